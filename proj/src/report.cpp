#include "awnet/eval/report.hpp"

#include <cstdio>
#include <sstream>

namespace awnet {

std::string render_eval_table(const EvalReport& r) {
    std::ostringstream os;
    char line[160];
    os << "image                 F1       ACC      AUC\n";
    for (const auto& e : r.per_image) {
        if (e.auc_valid)
            std::snprintf(line, sizeof line, "%-20s  %.4f   %.4f   %.4f\n", e.id.c_str(), e.f1, e.acc, e.auc);
        else
            std::snprintf(line, sizeof line, "%-20s  %.4f   %.4f   -\n", e.id.c_str(), e.f1, e.acc);
        os << line;
    }
    std::snprintf(line, sizeof line, "%-20s  %.4f   %.4f   %.4f   (threshold %.3f, pooled pixels)\n",
                  "aggregate", r.f1, r.acc, r.auc, r.threshold);
    os << line;
    return os.str();
}

std::vector<ThresholdPoint> threshold_sensitivity(const std::vector<float>& scores,
                                                  const std::vector<std::uint8_t>& labels,
                                                  const std::vector<double>& thresholds) {
    std::vector<ThresholdPoint> out;
    out.reserve(thresholds.size());
    for (const double t : thresholds) {
        ConfusionCounts c;
        for (std::size_t i = 0; i < scores.size(); ++i) {
            const bool p = scores[i] >= t, y = labels[i] != 0;
            if (p && y)
                ++c.tp;
            else if (p && !y)
                ++c.fp;
            else if (!p && y)
                ++c.fn;
            else
                ++c.tn;
        }
        const F1Acc fa = f1_accuracy(c);
        out.push_back({t, fa.f1, fa.acc});
    }
    return out;
}

std::vector<AblationKey> ablation_ladder() {
    return {
        {false, false, AttentionType::None},  // backbone
        {true, false, AttentionType::None},   // + residual block rework
        {true, true, AttentionType::None},    // + augmentation
        {true, true, AttentionType::Type1},   // + type-1 attention
        {true, true, AttentionType::Type2},   // + type-2 attention
    };
}

std::vector<AblationRow> ablation_report(const std::map<AblationKey, AblationCell>& results) {
    std::vector<AblationRow> rows;
    for (const auto& key : ablation_ladder()) {
        AblationRow row;
        row.key = key;
        const auto it = results.find(key);
        if (it != results.end()) row.result = it->second;
        rows.push_back(row);
    }
    return rows;
}

std::string render_ablation_table(const std::vector<AblationRow>& rows) {
    std::ostringstream os;
    os << "ResBlock  Augmentation  AB      F1       AUC\n";
    char line[160];
    for (const auto& row : rows) {
        const char* rb = row.key.modified_resblock ? "yes" : "no ";
        const char* aug = row.key.augmentation ? "yes" : "no ";
        std::string ab = row.key.attention == AttentionType::None
                             ? "none "
                             : (row.key.attention == AttentionType::Type1 ? "type1" : "type2");
        if (row.result)
            std::snprintf(line, sizeof line, "%-8s  %-12s  %-6s  %.4f   %.4f\n", rb, aug, ab.c_str(),
                          row.result->f1, row.result->auc);
        else
            std::snprintf(line, sizeof line, "%-8s  %-12s  %-6s  -        -\n", rb, aug, ab.c_str());
        os << line;
    }
    return os.str();
}

}  // namespace awnet
