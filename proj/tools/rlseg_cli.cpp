// rlseg command-line front end: synth | train | segment | eval | gradcheck | viz
//
// Exit codes: 0 success, 1 verification failure (gradcheck), 2 usage/config
// error. Failures print a single machine-readable line on stderr:
//   error: <category>: <message>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "rlseg/checks.hpp"
#include "rlseg/config.hpp"
#include "rlseg/image_io.hpp"
#include "rlseg/manifest.hpp"
#include "rlseg/metrics.hpp"
#include "rlseg/phantom.hpp"
#include "rlseg/pipeline.hpp"

namespace fs = std::filesystem;
using namespace rlseg;

namespace {

std::string case_id(int i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "case_%03d", i);
    return buf;
}

int cmd_synth(const std::string& spec_path, const std::string& out_dir, int count) {
    if (count < 2) throw ConfigError("--count must be >= 2 (need both splits non-empty)");
    const SynthConfig cfg = load_synth_config(spec_path);
    fs::create_directories(out_dir);
    const int n_train = static_cast<int>(std::llround(cfg.train_fraction * count));
    DatasetManifest train{"train", {}}, test{"test", {}};
    for (int i = 0; i < count; ++i) {
        PhantomSpec spec = cfg.phantom;
        spec.seed = cfg.phantom.seed + static_cast<std::uint64_t>(i);
        const Phantom ph = generate_phantom(spec);
        const std::string id = case_id(i);
        const std::string image_rel = id + ".lsf", gt_rel = id + "_gt.pgm";
        save_field_lsf(out_dir + "/" + image_rel, ph.image);
        save_mask(out_dir + "/" + gt_rel, ph.gt);
        (i < n_train ? train : test).entries.push_back({id, image_rel, gt_rel});
    }
    save_manifest(out_dir + "/train.manifest", train);
    save_manifest(out_dir + "/test.manifest", test);
    std::cout << "wrote " << train.entries.size() << " train / " << test.entries.size()
              << " test cases to " << out_dir << "\n";
    return 0;
}

int cmd_train(const std::string& manifest_path, const std::string& config_path,
              const std::string& out_model, int epochs, long long seed_override) {
    TrainConfig cfg = load_train_config(config_path);
    if (seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(seed_override);
    const DatasetManifest manifest = load_manifest(manifest_path);
    std::vector<TrainSample> dataset;
    dataset.reserve(manifest.entries.size());
    for (const auto& e : manifest.entries)
        dataset.push_back({load_image(e.image_path), load_mask(e.gt_path)});
    const TrainResult result = recurrent_train(cfg.model, dataset, epochs, cfg.learning_rate, cfg.seed,
                                          cfg.supervision, cfg.plateau_patience);
    save_model_bundle(out_model, result.model);
    std::ofstream loss(out_model + "/loss.csv", std::ios::trunc);
    if (!loss) throw IoError("cannot write " + out_model + "/loss.csv");
    loss << "epoch,mean_loss\n";
    char buf[48];
    for (std::size_t i = 0; i < result.loss_history.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%zu,%.9g\n", i, result.loss_history[i]);
        loss << buf;
    }
    if (!result.loss_history.empty())
        std::cout << "trained " << epochs << " epochs, final mean loss "
                  << result.loss_history.back() << "\n";
    std::cout << "model bundle written to " << out_model << "\n";
    return 0;
}

int cmd_segment(const std::string& model_dir, const std::string& image_path,
                const std::string& out_mask, const std::string& trace_dir) {
    const Model model = load_model_bundle(model_dir);
    const ScalarField2D image = load_image(image_path);
    const ForwardResult result = recurrent_forward(model, image, nullptr);
    save_mask(out_mask, result.mask);
    if (!trace_dir.empty()) {
        fs::create_directories(trace_dir);
        for (std::size_t k = 0; k < result.trace.steps.size(); ++k)
            emit_heatmap(result.trace.steps[k].phi,
                         trace_dir + "/step_" + std::to_string(k) + "_phi.png");
    }
    std::cout << "mask written to " << out_mask << " (" << result.trace.steps.size()
              << " recurrence steps)\n";
    return 0;
}

int cmd_eval(const std::string& model_dir, const std::string& manifest_path,
             const std::string& report_path, bool with_hausdorff) {
    const Model model = load_model_bundle(model_dir);
    DatasetManifest manifest = load_manifest(manifest_path);
    std::sort(manifest.entries.begin(), manifest.entries.end(),
              [](const ManifestEntry& a, const ManifestEntry& b) { return a.id < b.id; });
    EvalReport report;
    report.with_hausdorff = with_hausdorff;
    for (const auto& e : manifest.entries) {
        const ScalarField2D image = load_image(e.image_path);
        const BinaryMask gt = load_mask(e.gt_path);
        const ForwardResult result = recurrent_forward(model, image, nullptr);
        CaseMetrics m;
        m.id = e.id;
        try {
            m.dice = dice(result.mask, gt);
            m.sensitivity = sensitivity(result.mask, gt);
            m.specificity = specificity(result.mask, gt);
            if (with_hausdorff) m.hausdorff95 = hausdorff95(result.mask, gt);
        } catch (const UndefinedMetricError& err) {
            m.skip_reason = err.what();
        }
        report.cases.push_back(std::move(m));
    }
    std::ofstream out(report_path, std::ios::trunc);
    if (!out) throw IoError("cannot write " + report_path);
    report.write_csv(out);
    const MetricSummary d = report.summarize(&CaseMetrics::dice);
    std::printf("evaluated %zu cases: mean dice %.4f (std %.4f)\n", report.cases.size(), d.mean,
                d.stddev);
    return 0;
}

int cmd_gradcheck(const std::string& module) {
    std::vector<CheckResult> results;
    if (module == "all")
        results = run_all_checks();
    else if (module == "levelset")
        results = run_levelset_checks();
    else if (module == "neuralnet")
        results = run_neuralnet_checks();
    else
        throw ConfigError("--module must be all, levelset or neuralnet");
    bool all_pass = true;
    for (const auto& r : results) {
        std::printf("%s  %-32s %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
        all_pass = all_pass && r.pass;
    }
    return all_pass ? 0 : 1;
}

int cmd_viz(const std::string& field_path, const std::string& out_path) {
    emit_heatmap(load_image(field_path), out_path);
    std::cout << "heatmap written to " << out_path << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Recurrent level-set segmentation engine"};
    app.require_subcommand(1);

    std::string spec_path, out_dir;
    int count = 0;
    auto* synth = app.add_subcommand("synth", "Generate a phantom dataset with manifests");
    synth->add_option("--spec", spec_path, "Phantom config JSON")->required();
    synth->add_option("--out", out_dir, "Output directory")->required();
    synth->add_option("--count", count, "Number of cases")->required();

    std::string manifest_path, config_path, model_dir;
    int epochs = 0;
    long long seed_override = -1;
    auto* train = app.add_subcommand("train", "Train a model on a manifest");
    train->add_option("--manifest", manifest_path, "Training manifest")->required();
    train->add_option("--config", config_path, "Training config JSON")->required();
    train->add_option("--out-model", model_dir, "Output model bundle directory")->required();
    train->add_option("--epochs", epochs, "Training epochs")->required();
    train->add_option("--seed", seed_override, "Override the config seed");

    std::string image_path, out_mask, trace_dir;
    auto* segment = app.add_subcommand("segment", "Segment one image");
    segment->add_option("--model", model_dir, "Model bundle directory")->required();
    segment->add_option("--image", image_path, "Input image (.pgm/.png/.lsf)")->required();
    segment->add_option("--out-mask", out_mask, "Output mask path")->required();
    segment->add_option("--trace-dir", trace_dir, "Write per-step phi heatmaps here");

    std::string report_path;
    bool with_hausdorff = false;
    auto* eval = app.add_subcommand("eval", "Evaluate a model over a manifest");
    eval->add_option("--model", model_dir, "Model bundle directory")->required();
    eval->add_option("--manifest", manifest_path, "Evaluation manifest")->required();
    eval->add_option("--report", report_path, "Output CSV report")->required();
    eval->add_flag("--hausdorff", with_hausdorff, "Include the hausdorff95 column");

    std::string module = "all";
    auto* gradcheck = app.add_subcommand("gradcheck", "Run the verification suites");
    gradcheck->add_option("--module", module, "all | levelset | neuralnet");

    std::string field_path, out_path;
    auto* viz = app.add_subcommand("viz", "Render a field as a heatmap PNG");
    viz->add_option("--field", field_path, "Input field (.lsf/.pgm/.png)")->required();
    viz->add_option("--out", out_path, "Output PNG")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::cerr << "error: usage: " << e.get_name() << "\n";
        return 2;
    }

    try {
        if (synth->parsed()) return cmd_synth(spec_path, out_dir, count);
        if (train->parsed())
            return cmd_train(manifest_path, config_path, model_dir, epochs, seed_override);
        if (segment->parsed()) return cmd_segment(model_dir, image_path, out_mask, trace_dir);
        if (eval->parsed()) return cmd_eval(model_dir, manifest_path, report_path, with_hausdorff);
        if (gradcheck->parsed()) return cmd_gradcheck(module);
        if (viz->parsed()) return cmd_viz(field_path, out_path);
    } catch (const Error& e) {
        std::cerr << "error: " << e.category() << ": " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
