#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "awnet/eval/metrics.hpp"
#include "awnet/model/config.hpp"

namespace awnet {

struct ImageEval {
    std::string id;
    ConfusionCounts counts;
    double f1 = 0.0, acc = 0.0;
    double auc = 0.0;
    bool auc_valid = true;
};

struct ThresholdPoint {
    double threshold = 0.0;
    double f1 = 0.0, acc = 0.0;
};

// Aggregate metrics pool pixels across the whole test set; per-image values
// ride along for inspection. threshold_sweep documents the sensitivity of
// F1/ACC to the binarisation threshold.
struct EvalReport {
    double threshold = 0.5;
    std::vector<ImageEval> per_image;
    ConfusionCounts pooled;
    double f1 = 0.0, acc = 0.0, auc = 0.0;
    RocResult roc;
    std::vector<ThresholdPoint> threshold_sweep;
};

// Pooled F1/ACC at each threshold, computed from flattened (score, label)
// pairs.
std::vector<ThresholdPoint> threshold_sensitivity(const std::vector<float>& scores,
                                                  const std::vector<std::uint8_t>& labels,
                                                  const std::vector<double>& thresholds);

std::string render_eval_table(const EvalReport& r);

// One ablation configuration: which residual block, whether augmentation was
// on, and the attention flavour.
struct AblationKey {
    bool modified_resblock = false;
    bool augmentation = false;
    AttentionType attention = AttentionType::None;
    bool operator<(const AblationKey& o) const {
        if (modified_resblock != o.modified_resblock) return modified_resblock < o.modified_resblock;
        if (augmentation != o.augmentation) return augmentation < o.augmentation;
        return static_cast<int>(attention) < static_cast<int>(o.attention);
    }
};

struct AblationCell {
    double f1 = 0.0, auc = 0.0;
};

struct AblationRow {
    AblationKey key;
    std::optional<AblationCell> result;  // absent when the configuration was not run
};

// Fixed five-row layout: backbone, +resblock, +augmentation, +type-1
// attention, +type-2 attention. Missing configurations render as "-".
std::vector<AblationRow> ablation_report(const std::map<AblationKey, AblationCell>& results);
std::string render_ablation_table(const std::vector<AblationRow>& rows);

// The five canonical configurations in table order.
std::vector<AblationKey> ablation_ladder();

}  // namespace awnet
