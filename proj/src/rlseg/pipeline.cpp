#include "rlseg/pipeline.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace rlseg {

namespace {

struct StepRecord {
    RecurrenceStep step;
    ForwardTrace net_trace; // kept only when training needs it
};

EnergyWeights effective_weights(const EnergyWeights& w, const BinaryMask* gt) {
    EnergyWeights e = w;
    if (gt == nullptr) e.alpha = 0.0; // no supervision signal without GT
    return e;
}

[[noreturn]] void rethrow_with_step(const Error& e, int step) {
    const std::string msg = "recurrence step " + std::to_string(step) + ": " + e.what();
    if (dynamic_cast<const DegenerateRegionError*>(&e)) throw DegenerateRegionError(msg);
    if (dynamic_cast<const ShapeError*>(&e)) throw ShapeError(msg);
    throw Error(e.category(), msg);
}

std::vector<StepRecord> run_recurrence(const Model& model, const ScalarField2D& image,
                                       const BinaryMask* gt, bool keep_net_traces) {
    model.weights.validate();
    model.evolution.validate();
    model.conversion.validate();
    const EnergyWeights w = effective_weights(model.weights, gt);
    const DataFieldMode mode = model.evolution.data_field_mode;
    std::vector<StepRecord> records;
    records.reserve(static_cast<std::size_t>(model.evolution.nsteps) + 1);

    ScalarField2D net_input = image;
    for (int step = 0; step <= model.evolution.nsteps; ++step) {
        try {
            if (step > 0) {
                // Curve evolution on the previous step's phi, then re-extract.
                ScalarField2D phi = records.back().step.phi;
                const ScalarField2D& u = records.back().step.y;
                for (int it = 0; it < model.evolution.inner_iters; ++it) {
                    const RegionConstants c = region_constants(u, phi, w.epsilon, mode);
                    phi = evolution_step(phi, u, gt, c, w, model.evolution);
                }
                net_input = phi;
                for (double& v : net_input.values) v += 0.5; // [-0.5,0.5] -> [0,1]
            }
            StepRecord rec;
            rec.step.y = network_forward_field(model.layers, model.params, net_input,
                                               rec.net_trace);
            // phi = distance part + (y - 0.5): the additive term keeps the
            // level-set landscape aware of y's distance to the threshold
            // (and is the identity path gradients flow through in training).
            rec.step.phi = to_levelset(rec.step.y, model.conversion);
            for (std::size_t i = 0; i < rec.step.phi.values.size(); ++i)
                rec.step.phi.values[i] += rec.step.y.values[i] - 0.5;
            rec.step.c = region_constants(rec.step.y, rec.step.phi, w.epsilon, mode);
            rec.step.energy = energy(rec.step.y, rec.step.phi, gt, rec.step.c, w, mode);
            if (!keep_net_traces) rec.net_trace = ForwardTrace();
            records.push_back(std::move(rec));
        } catch (const Error& e) {
            rethrow_with_step(e, step);
        }
    }
    return records;
}

} // namespace

ForwardResult recurrent_forward(const Model& model, const ScalarField2D& image, const BinaryMask* gt) {
    const std::vector<StepRecord> records = run_recurrence(model, image, gt, false);
    ForwardResult result;
    result.trace.steps.reserve(records.size());
    for (const auto& r : records) result.trace.steps.push_back(r.step);
    result.mask = predict_mask(result.trace.steps.back().phi);
    return result;
}

TrainResult recurrent_train(Model model, const std::vector<TrainSample>& dataset, int epochs,
                       double learning_rate, std::uint64_t seed, SupervisionMode supervision,
                       int plateau_patience) {
    if (dataset.empty()) throw ConfigError("training dataset is empty");
    if (epochs < 0) throw ConfigError("epochs must be >= 0");
    if (learning_rate < 0.0) throw ConfigError("learning_rate must be >= 0");
    for (const auto& s : dataset) require_same_grid(s.image.grid, s.gt.grid, "training sample");

    model.layers = resolve_structure(model.layers);
    model.params = init_params(model.layers, 1, seed);
    const DataFieldMode mode = model.evolution.data_field_mode;

    double lr = learning_rate;
    double best = std::numeric_limits<double>::infinity();
    int stale = 0;
    std::vector<double> history;
    history.reserve(static_cast<std::size_t>(epochs));

    for (int epoch = 0; epoch < epochs; ++epoch) {
        double epoch_loss = 0.0;
        for (std::size_t si = 0; si < dataset.size(); ++si) {
            const TrainSample& sample = dataset[si];
            const std::vector<StepRecord> records =
                run_recurrence(model, sample.image, &sample.gt, true);
            const EnergyWeights w = model.weights;

            double loss = 0.0;
            const std::size_t first =
                supervision == SupervisionMode::per_step ? 0 : records.size() - 1;
            for (std::size_t k = first; k < records.size(); ++k) loss += records[k].step.energy;
            if (!std::isfinite(loss))
                throw Error("divergence", "non-finite loss at epoch " + std::to_string(epoch) +
                                              ", sample " + std::to_string(si));
            epoch_loss += loss;
            if (lr <= 0.0) continue;

            NetworkParams grads = zero_like(model.params);
            for (std::size_t k = first; k < records.size(); ++k) {
                const RecurrenceStep& st = records[k].step;
                // Straight-through conversion: dE/dy = dE/dphi + direct data term.
                ScalarField2D gy =
                    energy_gradient_phi(st.y, st.phi, &sample.gt, st.c, w, mode);
                const ScalarField2D gu = energy_gradient_data(st.y, st.phi, st.c, w, mode);
                for (std::size_t i = 0; i < gy.values.size(); ++i) gy.values[i] += gu.values[i];
                Tensor3D gout(1, st.y.grid.height, st.y.grid.width);
                gout.values = gy.values;
                const NetworkParams step_grads =
                    network_backward(model.layers, model.params, records[k].net_trace, gout);
                for (std::size_t li = 0; li < grads.layers.size(); ++li) {
                    for (std::size_t j = 0; j < grads.layers[li].w.size(); ++j)
                        grads.layers[li].w[j] += step_grads.layers[li].w[j];
                    for (std::size_t j = 0; j < grads.layers[li].b.size(); ++j)
                        grads.layers[li].b[j] += step_grads.layers[li].b[j];
                }
            }
            sgd_update(model.params, grads, lr);
        }
        const double mean_loss = epoch_loss / static_cast<double>(dataset.size());
        history.push_back(mean_loss);
        if (mean_loss < best) {
            best = mean_loss;
            stale = 0;
        } else if (++stale >= plateau_patience && plateau_patience > 0) {
            lr *= 0.5; // reduce when validation-style progress stalls
            stale = 0;
        }
    }
    return {std::move(model), std::move(history)};
}

} // namespace rlseg
