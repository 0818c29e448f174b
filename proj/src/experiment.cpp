#include "awnet/experiment.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

namespace awnet {

using nlohmann::json;

namespace {

json to_json(const ModelConfig& c) {
    return json{{"levels", c.levels},
                {"in_channels", c.in_channels},
                {"base_channels", c.base_channels},
                {"kernel", c.kernel},
                {"dropout_rate", c.dropout_rate},
                {"attention", to_string(c.attention)},
                {"resblock", to_string(c.resblock)}};
}

void from_json_model(const json& j, ModelConfig& c) {
    c.levels = j.value("levels", c.levels);
    c.in_channels = j.value("in_channels", c.in_channels);
    c.base_channels = j.value("base_channels", c.base_channels);
    c.kernel = j.value("kernel", c.kernel);
    c.dropout_rate = j.value("dropout_rate", c.dropout_rate);
    if (j.contains("attention")) c.attention = attention_from_string(j["attention"].get<std::string>());
    if (j.contains("resblock")) c.resblock = resblock_from_string(j["resblock"].get<std::string>());
}

json to_json(const TrainConfig& c) {
    json stages = json::array();
    for (const auto& s : c.lr_stages) stages.push_back({{"epoch_start", s.epoch_start}, {"lr", s.lr}});
    return json{{"dataset", to_string(c.dataset)},
                {"epochs_total", c.epochs_total},
                {"batch_size", c.batch_size},
                {"lr_stages", stages},
                {"plateau_enabled", c.plateau_enabled},
                {"plateau_patience", c.plateau_patience},
                {"plateau_factor", c.plateau_factor},
                {"val_fraction", c.val_fraction},
                {"val_split_by_image", c.val_split_by_image},
                {"train_stride", c.train_stride},
                {"max_train_patches", c.max_train_patches},
                {"augmentation_on", c.augmentation_on},
                {"checkpoint_every", c.checkpoint_every},
                {"seed", c.seed}};
}

void from_json_train(const json& j, TrainConfig& c) {
    if (j.contains("dataset")) c.dataset = dataset_from_string(j["dataset"].get<std::string>());
    c.epochs_total = j.value("epochs_total", c.epochs_total);
    c.batch_size = j.value("batch_size", c.batch_size);
    if (j.contains("lr_stages")) {
        c.lr_stages.clear();
        for (const auto& s : j["lr_stages"])
            c.lr_stages.push_back({s.at("epoch_start").get<int>(), s.at("lr").get<double>()});
    }
    c.plateau_enabled = j.value("plateau_enabled", c.plateau_enabled);
    c.plateau_patience = j.value("plateau_patience", c.plateau_patience);
    c.plateau_factor = j.value("plateau_factor", c.plateau_factor);
    c.val_fraction = j.value("val_fraction", c.val_fraction);
    c.val_split_by_image = j.value("val_split_by_image", c.val_split_by_image);
    c.train_stride = j.value("train_stride", c.train_stride);
    c.max_train_patches = j.value("max_train_patches", c.max_train_patches);
    c.augmentation_on = j.value("augmentation_on", c.augmentation_on);
    c.checkpoint_every = j.value("checkpoint_every", c.checkpoint_every);
    c.seed = j.value("seed", c.seed);
}

json to_json(const AugmentConfig& c) {
    return json{{"p_crop", c.p_crop},
                {"p_vflip", c.p_vflip},
                {"p_rot90", c.p_rot90},
                {"p_elastic", c.p_elastic},
                {"p_grid", c.p_grid},
                {"p_optical", c.p_optical},
                {"p_brightness", c.p_brightness},
                {"p_gamma", c.p_gamma},
                {"crop_scale_min", c.crop_scale_min},
                {"crop_scale_max", c.crop_scale_max},
                {"crop_pad_back", c.crop_pad_back},
                {"elastic_alpha", c.elastic_alpha},
                {"elastic_sigma", c.elastic_sigma},
                {"grid_steps", c.grid_steps},
                {"grid_limit", c.grid_limit},
                {"optical_limit", c.optical_limit},
                {"optical_shift", c.optical_shift},
                {"brightness_limit", c.brightness_limit},
                {"contrast_limit", c.contrast_limit},
                {"gamma_min", c.gamma_min},
                {"gamma_max", c.gamma_max}};
}

void from_json_augment(const json& j, AugmentConfig& c) {
    c.p_crop = j.value("p_crop", c.p_crop);
    c.p_vflip = j.value("p_vflip", c.p_vflip);
    c.p_rot90 = j.value("p_rot90", c.p_rot90);
    c.p_elastic = j.value("p_elastic", c.p_elastic);
    c.p_grid = j.value("p_grid", c.p_grid);
    c.p_optical = j.value("p_optical", c.p_optical);
    c.p_brightness = j.value("p_brightness", c.p_brightness);
    c.p_gamma = j.value("p_gamma", c.p_gamma);
    c.crop_scale_min = j.value("crop_scale_min", c.crop_scale_min);
    c.crop_scale_max = j.value("crop_scale_max", c.crop_scale_max);
    c.crop_pad_back = j.value("crop_pad_back", c.crop_pad_back);
    c.elastic_alpha = j.value("elastic_alpha", c.elastic_alpha);
    c.elastic_sigma = j.value("elastic_sigma", c.elastic_sigma);
    c.grid_steps = j.value("grid_steps", c.grid_steps);
    c.grid_limit = j.value("grid_limit", c.grid_limit);
    c.optical_limit = j.value("optical_limit", c.optical_limit);
    c.optical_shift = j.value("optical_shift", c.optical_shift);
    c.brightness_limit = j.value("brightness_limit", c.brightness_limit);
    c.contrast_limit = j.value("contrast_limit", c.contrast_limit);
    c.gamma_min = j.value("gamma_min", c.gamma_min);
    c.gamma_max = j.value("gamma_max", c.gamma_max);
}

json to_json(const PreprocessSettings& c) {
    return json{{"enhance", c.enhance},
                {"clahe_tile", c.clahe_tile},
                {"clahe_clip", c.clahe_clip},
                {"gamma", c.gamma}};
}

void from_json_preprocess(const json& j, PreprocessSettings& c) {
    c.enhance = j.value("enhance", c.enhance);
    c.clahe_tile = j.value("clahe_tile", c.clahe_tile);
    c.clahe_clip = j.value("clahe_clip", c.clahe_clip);
    c.gamma = j.value("gamma", c.gamma);
}

}  // namespace

void ExperimentConfig::validate() const {
    model.validate();
    train.validate();
    augment.validate();
    if (infer_stride < 1) throw ConfigError("infer_stride must be >= 1");
    if (infer_batch < 1) throw ConfigError("infer_batch must be >= 1");
    if (threshold <= 0.0 || threshold >= 1.0) throw ConfigError("threshold must be in (0,1)");
    if (seeds.empty()) throw ConfigError("seed list must not be empty");
}

std::string experiment_config_to_json(const ExperimentConfig& cfg) {
    json j;
    j["data_root"] = cfg.data_root.string();
    j["model"] = to_json(cfg.model);
    j["train"] = to_json(cfg.train);
    j["augment"] = to_json(cfg.augment);
    j["preprocess"] = to_json(cfg.preprocess);
    j["infer_stride"] = cfg.infer_stride;
    j["infer_batch"] = cfg.infer_batch;
    j["threshold"] = cfg.threshold;
    j["seeds"] = cfg.seeds;
    return j.dump(2);
}

ExperimentConfig experiment_config_from_json(const std::string& text) {
    const json j = json::parse(text);
    ExperimentConfig cfg;
    if (j.contains("data_root")) cfg.data_root = j["data_root"].get<std::string>();
    if (j.contains("model")) from_json_model(j["model"], cfg.model);
    if (j.contains("train")) from_json_train(j["train"], cfg.train);
    if (j.contains("augment")) from_json_augment(j["augment"], cfg.augment);
    if (j.contains("preprocess")) from_json_preprocess(j["preprocess"], cfg.preprocess);
    cfg.infer_stride = j.value("infer_stride", cfg.infer_stride);
    cfg.infer_batch = j.value("infer_batch", cfg.infer_batch);
    cfg.threshold = j.value("threshold", cfg.threshold);
    if (j.contains("seeds")) cfg.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
    return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config: " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return experiment_config_from_json(text);
    } catch (const json::exception& e) {
        throw ConfigError("bad config file " + path.string() + ": " + e.what());
    }
}

void save_experiment_config(const std::filesystem::path& path, const ExperimentConfig& cfg) {
    if (!path.parent_path().empty()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write config: " + path.string());
    out << experiment_config_to_json(cfg) << "\n";
}

std::string config_fingerprint(const ExperimentConfig& cfg) {
    const std::string text = experiment_config_to_json(cfg);
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace awnet
