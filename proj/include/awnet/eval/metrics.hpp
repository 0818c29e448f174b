#pragma once

#include <cstdint>
#include <vector>

#include "awnet/data/image.hpp"

namespace awnet {

struct ConfusionCounts {
    std::int64_t tp = 0, fp = 0, tn = 0, fn = 0;
    std::int64_t total() const { return tp + fp + tn + fn; }
    ConfusionCounts& operator+=(const ConfusionCounts& o) {
        tp += o.tp;
        fp += o.fp;
        tn += o.tn;
        fn += o.fn;
        return *this;
    }
};

// Pixel counts restricted to fov = 1.
ConfusionCounts confusion_counts(const BinaryMask& pred, const BinaryMask& truth, const BinaryMask& fov);

struct F1Acc {
    double f1 = 0.0;
    double acc = 0.0;
    bool f1_degenerate = false;  // 2TP+FP+FN was zero; f1 reported as 0
};
F1Acc f1_accuracy(const ConfusionCounts& c);

struct RocPoint {
    double fpr = 0.0, tpr = 0.0;
};

struct RocResult {
    std::vector<RocPoint> points;  // from (0,0) to (1,1), both coords non-decreasing
    double auc = 0.0;
};

// ROC over every distinct score threshold; AUC by trapezoidal integration.
// bins > 0 switches to the approximate fixed-bin variant. Throws InputError
// when truth holds a single class (AUC undefined).
RocResult roc_auc(const std::vector<float>& scores, const std::vector<std::uint8_t>& truth, int bins = 0);

// Flattens (prob, truth) over fov = 1 pixels into score/label vectors,
// appending so that calls can pool several images.
void collect_fov_scores(const ImageF& prob, const BinaryMask& truth, const BinaryMask& fov,
                        std::vector<float>& scores, std::vector<std::uint8_t>& labels);

}  // namespace awnet
