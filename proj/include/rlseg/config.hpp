#pragma once

#include <cstdint>
#include <string>

#include "rlseg/phantom.hpp"
#include "rlseg/pipeline.hpp"

// JSON configuration files. Every EnergyWeights / EvolutionConfig /
// ConversionOptions / LayerSpec field has an explicit key; unknown keys are
// errors, so defaults cannot drift silently. Seeds are mandatory where
// randomness is drawn (train and synth configs).

namespace rlseg {

struct TrainConfig {
    Model model; // layers + weights + evolution + conversion (params empty)
    std::uint64_t seed = 0;
    double learning_rate = 1e-4;
    SupervisionMode supervision = SupervisionMode::per_step;
    int plateau_patience = 5;
};

struct SynthConfig {
    PhantomSpec phantom; // per-case seed is derived as phantom.seed + index
    double train_fraction = 0.8;
};

TrainConfig load_train_config(const std::string& path);

SynthConfig load_synth_config(const std::string& path);

// Model bundle: <dir>/config.json + <dir>/params.ckpt. The checkpoint's layer
// table must agree with the config's network section.
void save_model_bundle(const std::string& dir, const Model& model);
Model load_model_bundle(const std::string& dir);

} // namespace rlseg
