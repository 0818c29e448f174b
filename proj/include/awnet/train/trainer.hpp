#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "awnet/augment/augment.hpp"
#include "awnet/data/preprocess.hpp"
#include "awnet/model/config.hpp"
#include "awnet/train/schedule.hpp"

namespace awnet {

struct EpochRecord {
    int epoch = 0;
    double train_loss = 0.0;
    double val_loss = 0.0;
    double lr = 0.0;
    double wall_seconds = 0.0;
};

struct RunHistory {
    std::vector<EpochRecord> epochs;
    int best_epoch = -1;  // by validation loss
    double best_val_loss = 0.0;
};

struct TrainResult {
    RunHistory history;
    std::filesystem::path last_checkpoint;
    std::filesystem::path best_checkpoint;
};

// Runs the full training protocol over preloaded samples. Artifacts land in
// run_dir: history.jsonl (one record per epoch), checkpoints/epoch_NNNN.awn,
// checkpoints/best.awn, and a lock file held for the duration (one writer per
// run directory). Deterministic for a fixed seed and thread count.
TrainResult train(const ModelConfig& model_cfg, const TrainConfig& train_cfg, const AugmentConfig& aug_cfg,
                  const PreprocessSettings& pp, const std::vector<FundusSample>& samples,
                  const std::filesystem::path& run_dir);

}  // namespace awnet
