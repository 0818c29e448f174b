#pragma once

#include <cstdint>
#include <vector>

#include "awnet/data/dataset.hpp"
#include "awnet/errors.hpp"

namespace awnet {

struct LrStage {
    int epoch_start = 0;
    double lr = 1e-3;
};

struct TrainConfig {
    DatasetId dataset = DatasetId::Drive;
    int epochs_total = 250;
    int batch_size = 1024;
    std::vector<LrStage> lr_stages = {{0, 1e-3}, {100, 1e-4}};

    // Optional "reduce on plateau" refinement on top of the stage table.
    // Monitors validation loss; never raises the rate; floored at the
    // smallest staged rate.
    bool plateau_enabled = false;
    int plateau_patience = 20;
    double plateau_factor = 0.5;

    double val_fraction = 0.10;
    bool val_split_by_image = false;  // default: patch-level holdout
    int train_stride = 5;
    int max_train_patches = 0;  // 0 = use the full grid; >0 caps the pool (smoke budgets)
    bool augmentation_on = true;
    int checkpoint_every = 1;
    std::uint64_t seed = 0;

    void validate() const {
        if (epochs_total < 1) throw ConfigError("epochs_total must be >= 1");
        if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
        if (lr_stages.empty()) throw ConfigError("lr schedule needs at least one stage");
        for (std::size_t i = 0; i < lr_stages.size(); ++i) {
            if (lr_stages[i].lr <= 0) throw ConfigError("learning rate must be positive");
            if (i > 0 && lr_stages[i].epoch_start <= lr_stages[i - 1].epoch_start)
                throw ConfigError("lr stages must have strictly increasing epoch_start");
        }
        if (val_fraction <= 0.0 || val_fraction >= 1.0) throw ConfigError("val_fraction must be in (0,1)");
        if (train_stride < 1) throw ConfigError("train_stride must be >= 1");
    }
};

// Published training protocols: 250 epochs at 1e-3/1e-4 staged for the
// smaller dataset; the larger one trains 50 extra epochs at 5e-5.
TrainConfig default_train_config(DatasetId ds);

// Stage-table rate for an epoch (the plateau refinement is applied by the
// trainer on top of this, never below the table's smallest rate).
double lr_at(int epoch, const TrainConfig& cfg);

}  // namespace awnet
