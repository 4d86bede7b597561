#include "rlseg/config.hpp"

#include <filesystem>
#include <fstream>
#include <set>

#include "json.hpp"

namespace rlseg {

namespace {

using nlohmann::json;

json parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path + ": " + e.what(), e.byte);
    }
}

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
    for (const auto& item : obj.items()) {
        if (!allowed.contains(item.key()))
            throw ConfigError(where + ": unknown key \"" + item.key() + "\"");
    }
}

const json& require(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key)) throw ConfigError(where + ": missing key \"" + key + "\"");
    return obj.at(key);
}

double get_double(const json& obj, const std::string& key, const std::string& where) {
    const json& v = require(obj, key, where);
    if (!v.is_number()) throw ConfigError(where + "." + key + " must be a number");
    return v.get<double>();
}

int get_int(const json& obj, const std::string& key, const std::string& where) {
    const json& v = require(obj, key, where);
    if (!v.is_number_integer()) throw ConfigError(where + "." + key + " must be an integer");
    return v.get<int>();
}

bool get_bool(const json& obj, const std::string& key, const std::string& where) {
    const json& v = require(obj, key, where);
    if (!v.is_boolean()) throw ConfigError(where + "." + key + " must be a boolean");
    return v.get<bool>();
}

std::string get_string(const json& obj, const std::string& key, const std::string& where) {
    const json& v = require(obj, key, where);
    if (!v.is_string()) throw ConfigError(where + "." + key + " must be a string");
    return v.get<std::string>();
}

std::uint64_t get_seed(const json& obj, const std::string& where) {
    const json& v = require(obj, "seed", where);
    if (!v.is_number_unsigned() && !v.is_number_integer())
        throw ConfigError(where + ".seed must be a non-negative integer");
    const auto s = v.get<std::int64_t>();
    if (s < 0) throw ConfigError(where + ".seed must be >= 0");
    return static_cast<std::uint64_t>(s);
}

EnergyWeights parse_energy(const json& obj) {
    check_keys(obj, {"mu", "nu", "alpha", "lambda1", "lambda2", "epsilon"}, "energy");
    EnergyWeights w;
    w.mu = get_double(obj, "mu", "energy");
    w.nu = get_double(obj, "nu", "energy");
    w.alpha = get_double(obj, "alpha", "energy");
    w.lambda1 = get_double(obj, "lambda1", "energy");
    w.lambda2 = get_double(obj, "lambda2", "energy");
    w.epsilon = get_double(obj, "epsilon", "energy");
    w.validate();
    return w;
}

json dump_energy(const EnergyWeights& w) {
    return {{"mu", w.mu},           {"nu", w.nu},           {"alpha", w.alpha},
            {"lambda1", w.lambda1}, {"lambda2", w.lambda2}, {"epsilon", w.epsilon}};
}

DataFieldMode parse_mode(const std::string& s, const std::string& where) {
    if (s == "as_written") return DataFieldMode::as_written;
    if (s == "feature_map") return DataFieldMode::feature_map;
    throw ConfigError(where + ": data_field_mode must be as_written or feature_map");
}

EvolutionConfig parse_evolution(const json& obj) {
    check_keys(obj,
               {"eta", "inner_iters", "nsteps", "include_supervision_in_evolution",
                "data_field_mode"},
               "evolution");
    EvolutionConfig cfg;
    cfg.eta = get_double(obj, "eta", "evolution");
    cfg.inner_iters = get_int(obj, "inner_iters", "evolution");
    cfg.nsteps = get_int(obj, "nsteps", "evolution");
    cfg.include_supervision_in_evolution =
        get_bool(obj, "include_supervision_in_evolution", "evolution");
    cfg.data_field_mode = parse_mode(get_string(obj, "data_field_mode", "evolution"), "evolution");
    cfg.validate();
    return cfg;
}

json dump_evolution(const EvolutionConfig& cfg) {
    return {{"eta", cfg.eta},
            {"inner_iters", cfg.inner_iters},
            {"nsteps", cfg.nsteps},
            {"include_supervision_in_evolution", cfg.include_supervision_in_evolution},
            {"data_field_mode",
             cfg.data_field_mode == DataFieldMode::as_written ? "as_written" : "feature_map"}};
}

ConversionOptions parse_conversion(const json& obj) {
    check_keys(obj, {"binarize_threshold", "normalization", "degenerate_value"}, "conversion");
    ConversionOptions opts;
    opts.binarize_threshold = get_double(obj, "binarize_threshold", "conversion");
    const std::string norm = get_string(obj, "normalization", "conversion");
    if (norm == "max_abs")
        opts.normalization = LevelSetNormalization::max_abs;
    else if (norm == "clamp_halfwidth")
        opts.normalization = LevelSetNormalization::clamp_halfwidth;
    else
        throw ConfigError("conversion.normalization must be max_abs or clamp_halfwidth");
    opts.degenerate_value = get_double(obj, "degenerate_value", "conversion");
    opts.validate();
    return opts;
}

json dump_conversion(const ConversionOptions& opts) {
    return {{"binarize_threshold", opts.binarize_threshold},
            {"normalization",
             opts.normalization == LevelSetNormalization::max_abs ? "max_abs" : "clamp_halfwidth"},
            {"degenerate_value", opts.degenerate_value}};
}

std::vector<LayerSpec> parse_layers(const json& obj) {
    check_keys(obj, {"layers"}, "network");
    const json& arr = require(obj, "layers", "network");
    if (!arr.is_array() || arr.empty())
        throw ConfigError("network.layers must be a non-empty array");
    std::vector<LayerSpec> layers;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const json& l = arr[i];
        const std::string where = "network.layers[" + std::to_string(i) + "]";
        const std::string kind = get_string(l, "kind", where);
        if (kind == "conv") {
            check_keys(l, {"kind", "out_channels", "kernel", "stride"}, where);
            layers.push_back(LayerSpec::Conv(get_int(l, "out_channels", where),
                                             get_int(l, "kernel", where),
                                             get_int(l, "stride", where)));
        } else if (kind == "relu") {
            check_keys(l, {"kind"}, where);
            layers.push_back(LayerSpec::Relu());
        } else if (kind == "maxpool") {
            check_keys(l, {"kind"}, where);
            layers.push_back(LayerSpec::MaxPool());
        } else if (kind == "deconv") {
            check_keys(l, {"kind", "out_channels", "pool_source"}, where);
            const int pool = l.contains("pool_source") ? get_int(l, "pool_source", where) : -1;
            layers.push_back(LayerSpec::Deconv(get_int(l, "out_channels", where), pool));
        } else if (kind == "skip_concat") {
            check_keys(l, {"kind", "source"}, where);
            layers.push_back(LayerSpec::SkipConcat(get_int(l, "source", where)));
        } else if (kind == "logistic_head") {
            check_keys(l, {"kind"}, where);
            layers.push_back(LayerSpec::LogisticHead());
        } else {
            throw ConfigError(where + ": unknown layer kind \"" + kind + "\"");
        }
    }
    return resolve_structure(std::move(layers));
}

json dump_layers(const std::vector<LayerSpec>& layers) {
    json arr = json::array();
    for (const LayerSpec& l : layers) {
        switch (l.kind) {
        case LayerKind::conv:
            arr.push_back({{"kind", "conv"},
                           {"out_channels", l.out_channels},
                           {"kernel", l.kernel},
                           {"stride", l.stride}});
            break;
        case LayerKind::relu:
            arr.push_back({{"kind", "relu"}});
            break;
        case LayerKind::maxpool:
            arr.push_back({{"kind", "maxpool"}});
            break;
        case LayerKind::deconv:
            arr.push_back({{"kind", "deconv"},
                           {"out_channels", l.out_channels},
                           {"pool_source", l.pool_source}});
            break;
        case LayerKind::skip_concat:
            arr.push_back({{"kind", "skip_concat"}, {"source", l.skip_source}});
            break;
        case LayerKind::logistic_head:
            arr.push_back({{"kind", "logistic_head"}});
            break;
        }
    }
    return {{"layers", arr}};
}

Model parse_model_sections(const json& root, const std::string& path) {
    Model model;
    model.weights = parse_energy(require(root, "energy", path));
    model.evolution = parse_evolution(require(root, "evolution", path));
    model.conversion = parse_conversion(require(root, "conversion", path));
    model.layers = parse_layers(require(root, "network", path));
    return model;
}

} // namespace

TrainConfig load_train_config(const std::string& path) {
    const json root = parse_file(path);
    check_keys(root,
               {"seed", "learning_rate", "supervision", "plateau_patience", "energy", "evolution",
                "conversion", "network"},
               path);
    TrainConfig cfg;
    cfg.model = parse_model_sections(root, path);
    cfg.seed = get_seed(root, path);
    cfg.learning_rate = get_double(root, "learning_rate", path);
    if (cfg.learning_rate < 0.0) throw ConfigError(path + ": learning_rate must be >= 0");
    const std::string sup = get_string(root, "supervision", path);
    if (sup == "per_step")
        cfg.supervision = SupervisionMode::per_step;
    else if (sup == "final_step")
        cfg.supervision = SupervisionMode::final_step;
    else
        throw ConfigError(path + ": supervision must be per_step or final_step");
    cfg.plateau_patience = get_int(root, "plateau_patience", path);
    if (cfg.plateau_patience < 1) throw ConfigError(path + ": plateau_patience must be >= 1");
    return cfg;
}

SynthConfig load_synth_config(const std::string& path) {
    const json root = parse_file(path);
    SynthConfig cfg;
    const std::string shape = get_string(root, "shape", path);
    std::set<std::string> allowed = {"width",       "height",       "shape",
                                     "fg_intensity", "bg_intensity", "noise_sigma",
                                     "inhomogeneity_strength", "seed", "train_fraction"};
    if (shape == "disk") {
        cfg.phantom.shape = PhantomShape::disk;
        allowed.insert("radius");
    } else if (shape == "ellipse") {
        cfg.phantom.shape = PhantomShape::ellipse;
        allowed.insert({"a", "b", "angle"});
    } else if (shape == "blob") {
        cfg.phantom.shape = PhantomShape::blob;
        allowed.insert({"radius", "control_points", "smoothness"});
    } else {
        throw ConfigError(path + ": shape must be disk, ellipse or blob");
    }
    check_keys(root, allowed, path);
    cfg.phantom.width = get_int(root, "width", path);
    cfg.phantom.height = get_int(root, "height", path);
    cfg.phantom.fg_intensity = get_double(root, "fg_intensity", path);
    cfg.phantom.bg_intensity = get_double(root, "bg_intensity", path);
    cfg.phantom.noise_sigma = get_double(root, "noise_sigma", path);
    cfg.phantom.inhomogeneity_strength = get_double(root, "inhomogeneity_strength", path);
    cfg.phantom.seed = get_seed(root, path);
    cfg.train_fraction = get_double(root, "train_fraction", path);
    if (!(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0))
        throw ConfigError(path + ": train_fraction must lie in (0, 1)");
    if (shape == "disk" || shape == "blob") cfg.phantom.radius = get_double(root, "radius", path);
    if (shape == "ellipse") {
        cfg.phantom.ellipse_a = get_double(root, "a", path);
        cfg.phantom.ellipse_b = get_double(root, "b", path);
        cfg.phantom.ellipse_angle = get_double(root, "angle", path);
    }
    if (shape == "blob") {
        cfg.phantom.blob_control_points = get_int(root, "control_points", path);
        cfg.phantom.blob_smoothness = get_double(root, "smoothness", path);
    }
    cfg.phantom.validate();
    return cfg;
}

void save_model_bundle(const std::string& dir, const Model& model) {
    std::filesystem::create_directories(dir);
    json root;
    root["energy"] = dump_energy(model.weights);
    root["evolution"] = dump_evolution(model.evolution);
    root["conversion"] = dump_conversion(model.conversion);
    root["network"] = dump_layers(model.layers);
    std::ofstream out(dir + "/config.json", std::ios::trunc);
    if (!out) throw IoError("cannot write " + dir + "/config.json");
    out << root.dump(2) << "\n";
    save_checkpoint(dir + "/params.ckpt", model.layers, model.params);
}

Model load_model_bundle(const std::string& dir) {
    const std::string config_path = dir + "/config.json";
    const json root = parse_file(config_path);
    check_keys(root, {"energy", "evolution", "conversion", "network"}, config_path);
    Model model = parse_model_sections(root, config_path);
    auto [layers, params] = load_checkpoint(dir + "/params.ckpt");
    if (layers != model.layers)
        throw ConfigError(dir + ": checkpoint layer table does not match config.json");
    model.params = std::move(params);
    return model;
}

} // namespace rlseg
