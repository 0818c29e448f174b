#include "awnet/train/schedule.hpp"

namespace awnet {

TrainConfig default_train_config(DatasetId ds) {
    TrainConfig cfg;
    cfg.dataset = ds;
    if (ds == DatasetId::Drive) {
        cfg.epochs_total = 250;
        cfg.lr_stages = {{0, 1e-3}, {100, 1e-4}};
    } else {
        cfg.epochs_total = 300;
        cfg.lr_stages = {{0, 1e-3}, {100, 1e-4}, {250, 5e-5}};
    }
    return cfg;
}

double lr_at(int epoch, const TrainConfig& cfg) {
    cfg.validate();
    if (epoch < 0 || epoch >= cfg.epochs_total) throw InputError("epoch outside [0, epochs_total)");
    double lr = cfg.lr_stages.front().lr;
    for (const auto& stage : cfg.lr_stages)
        if (epoch >= stage.epoch_start) lr = stage.lr;
    return lr;
}

}  // namespace awnet
