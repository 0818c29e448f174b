#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "awnet/augment/augment.hpp"
#include "awnet/data/preprocess.hpp"
#include "awnet/model/config.hpp"
#include "awnet/train/schedule.hpp"

namespace awnet {

// Everything one run needs, serialisable as a single JSON document. The CLI
// reads a config file, applies flag overrides, and snapshots the resolved
// config into the run directory so every artifact is reproducible.
struct ExperimentConfig {
    std::filesystem::path data_root = "data";
    ModelConfig model;
    TrainConfig train;
    AugmentConfig augment;
    PreprocessSettings preprocess;

    int infer_stride = 5;
    int infer_batch = 1024;
    double threshold = 0.5;
    std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};  // significance runs

    void validate() const;
};

ExperimentConfig load_experiment_config(const std::filesystem::path& path);
void save_experiment_config(const std::filesystem::path& path, const ExperimentConfig& cfg);
std::string experiment_config_to_json(const ExperimentConfig& cfg);
ExperimentConfig experiment_config_from_json(const std::string& text);

// FNV-1a over a canonical serialisation; used for cache manifests.
std::string config_fingerprint(const ExperimentConfig& cfg);

}  // namespace awnet
