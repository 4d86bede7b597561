#pragma once

#include <cstdint>
#include <vector>

#include "rlseg/distance.hpp"
#include "rlseg/levelset.hpp"
#include "rlseg/net.hpp"

// The recurrent coupling: feature extraction -> level-set conversion ->
// curve evolution -> re-extraction, plus the training driver.
//
// Recurrence (nsteps + 1 trace entries):
//   step 0:   y = net(image);      phi = to_levelset(y) + (y - 0.5)
//   step k>0: phi <- evolution_step x inner_iters (c refreshed each iter),
//             y = net(phi + 0.5);  phi = to_levelset(y) + (y - 0.5)
// Final mask is phi >= 0 (the distance part and y - 0.5 share their sign, so
// the mask equals the binarized y).
//
// The (y - 0.5) term matters twice over: it keeps the level-set landscape
// aware of how far each y value sits from the binarization threshold, and it
// is the path gradients take in training (the distance part is
// piecewise-constant in y, so d phi/d y is treated as identity). Gradients
// are truncated at each network invocation; c1/c2 are stationary in the
// energy so holding them fixed is exact.

namespace rlseg {

struct Model {
    std::vector<LayerSpec> layers;
    NetworkParams params;
    EnergyWeights weights;
    EvolutionConfig evolution;
    ConversionOptions conversion;
};

struct RecurrenceStep {
    ScalarField2D y;
    ScalarField2D phi;
    RegionConstants c;
    double energy = 0.0;
};

struct RecurrenceTrace {
    std::vector<RecurrenceStep> steps; // size nsteps + 1
};

struct ForwardResult {
    BinaryMask mask;
    RecurrenceTrace trace;
};

// gt may be null (inference): the supervision term is then skipped.
// Degenerate-region and structural errors carry the recurrence step index.
ForwardResult recurrent_forward(const Model& model, const ScalarField2D& image, const BinaryMask* gt);

struct TrainSample {
    ScalarField2D image;
    BinaryMask gt;
};

enum class SupervisionMode {
    per_step,   // loss sums the energy of every recurrence step
    final_step, // loss is the last step's energy only
};

struct TrainResult {
    Model model;
    std::vector<double> loss_history; // mean loss per epoch
};

// Initializes parameters from `seed`, then runs per-sample SGD for `epochs`
// passes over the dataset in order. The learning rate halves after
// `plateau_patience` epochs without improvement. learning_rate == 0 performs
// no updates. Aborts with a divergence error if the loss becomes non-finite.
TrainResult recurrent_train(Model model, const std::vector<TrainSample>& dataset, int epochs,
                       double learning_rate, std::uint64_t seed,
                       SupervisionMode supervision = SupervisionMode::per_step,
                       int plateau_patience = 5);

} // namespace rlseg
