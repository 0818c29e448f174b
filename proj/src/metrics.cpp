#include "awnet/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace awnet {

ConfusionCounts confusion_counts(const BinaryMask& pred, const BinaryMask& truth, const BinaryMask& fov) {
    if (pred.h != truth.h || pred.w != truth.w || pred.h != fov.h || pred.w != fov.w)
        throw InputError("confusion_counts: shape mismatch");
    ConfusionCounts c;
    for (std::size_t i = 0; i < pred.px.size(); ++i) {
        if (!fov.px[i]) continue;
        const bool p = pred.px[i] != 0, t = truth.px[i] != 0;
        if (p && t)
            ++c.tp;
        else if (p && !t)
            ++c.fp;
        else if (!p && t)
            ++c.fn;
        else
            ++c.tn;
    }
    return c;
}

F1Acc f1_accuracy(const ConfusionCounts& c) {
    F1Acc r;
    const std::int64_t denom = 2 * c.tp + c.fp + c.fn;
    if (denom == 0) {
        r.f1 = 0.0;
        r.f1_degenerate = true;
    } else {
        r.f1 = 2.0 * static_cast<double>(c.tp) / static_cast<double>(denom);
    }
    const std::int64_t total = c.total();
    r.acc = total > 0 ? static_cast<double>(c.tp + c.tn) / static_cast<double>(total) : 0.0;
    return r;
}

void collect_fov_scores(const ImageF& prob, const BinaryMask& truth, const BinaryMask& fov,
                        std::vector<float>& scores, std::vector<std::uint8_t>& labels) {
    if (prob.h != truth.h || prob.w != truth.w || prob.h != fov.h || prob.w != fov.w)
        throw InputError("collect_fov_scores: shape mismatch");
    for (std::size_t i = 0; i < prob.px.size(); ++i) {
        if (!fov.px[i]) continue;
        scores.push_back(prob.px[i]);
        labels.push_back(truth.px[i] ? 1 : 0);
    }
}

RocResult roc_auc(const std::vector<float>& scores, const std::vector<std::uint8_t>& truth, int bins) {
    if (scores.size() != truth.size()) throw InputError("roc_auc: score/label size mismatch");
    if (scores.empty()) throw InputError("roc_auc: empty input");
    std::int64_t pos = 0;
    for (auto t : truth) pos += t ? 1 : 0;
    const std::int64_t neg = static_cast<std::int64_t>(truth.size()) - pos;
    if (pos == 0 || neg == 0)
        throw InputError("roc_auc: truth contains a single class, AUC undefined");

    RocResult out;
    out.points.push_back({0.0, 0.0});

    if (bins > 0) {
        // Approximate fixed-bin sweep (documented fast path).
        std::vector<std::int64_t> pos_hist(bins, 0), neg_hist(bins, 0);
        for (std::size_t i = 0; i < scores.size(); ++i) {
            int b = static_cast<int>(std::clamp(scores[i], 0.f, 1.f) * (bins - 1) + 0.5f);
            b = std::clamp(b, 0, bins - 1);
            (truth[i] ? pos_hist[b] : neg_hist[b]) += 1;
        }
        std::int64_t tp = 0, fp = 0;
        for (int b = bins - 1; b >= 0; --b) {
            tp += pos_hist[b];
            fp += neg_hist[b];
            out.points.push_back({static_cast<double>(fp) / neg, static_cast<double>(tp) / pos});
        }
    } else {
        // Exact sweep over every distinct score value.
        std::vector<std::size_t> order(scores.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
        std::int64_t tp = 0, fp = 0;
        for (std::size_t i = 0; i < order.size(); ++i) {
            (truth[order[i]] ? tp : fp) += 1;
            const bool last_of_value = (i + 1 == order.size()) || scores[order[i + 1]] != scores[order[i]];
            if (last_of_value)
                out.points.push_back({static_cast<double>(fp) / neg, static_cast<double>(tp) / pos});
        }
    }
    if (out.points.back().fpr != 1.0 || out.points.back().tpr != 1.0) out.points.push_back({1.0, 1.0});

    double auc = 0.0;
    for (std::size_t i = 1; i < out.points.size(); ++i)
        auc += (out.points[i].fpr - out.points[i - 1].fpr) * (out.points[i].tpr + out.points[i - 1].tpr) / 2.0;
    out.auc = auc;
    return out;
}

}  // namespace awnet
