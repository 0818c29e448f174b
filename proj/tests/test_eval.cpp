#include "doctest.h"

#include <cmath>

#include "awnet/eval/metrics.hpp"
#include "awnet/eval/report.hpp"
#include "awnet/eval/significance.hpp"
#include "testutil.hpp"

using namespace awnet;
using namespace awnet::testutil;

TEST_SUITE_BEGIN("eval");

// Published five-run columns used by the significance harness checks.
static const std::vector<double> kBaselineF1 = {0.8202, 0.8195, 0.8210, 0.8203, 0.8191};
static const std::vector<double> kOursF1 = {0.8407, 0.8390, 0.8374, 0.8397, 0.8389};
static const std::vector<double> kBaselineAuc = {0.9793, 0.9801, 0.9812, 0.9785, 0.9790};
static const std::vector<double> kOursAuc = {0.9833, 0.9835, 0.9844, 0.9844, 0.9824};

TEST_CASE("confusion: trivial identities and a loop oracle on random masks") {
    Rng rng(1);
    BinaryMask pred(10, 10, 1), truth(10, 10, 1), fov(10, 10, 1);
    for (std::size_t i = 0; i < 100; ++i) {
        pred.px[i] = rng.bernoulli(0.4);
        truth.px[i] = rng.bernoulli(0.3);
        fov.px[i] = rng.bernoulli(0.8);
    }
    const ConfusionCounts c = confusion_counts(pred, truth, fov);
    // scalar oracle
    std::int64_t tp = 0, fp = 0, tn = 0, fn = 0, inside = 0;
    for (std::size_t i = 0; i < 100; ++i) {
        if (!fov.px[i]) continue;
        ++inside;
        tp += (pred.px[i] && truth.px[i]);
        fp += (pred.px[i] && !truth.px[i]);
        fn += (!pred.px[i] && truth.px[i]);
        tn += (!pred.px[i] && !truth.px[i]);
    }
    CHECK(c.tp == tp);
    CHECK(c.fp == fp);
    CHECK(c.tn == tn);
    CHECK(c.fn == fn);
    CHECK(c.total() == inside);

    const ConfusionCounts perf = confusion_counts(truth, truth, fov);
    CHECK(perf.fp == 0);
    CHECK(perf.fn == 0);

    BinaryMask inverted = truth;
    for (auto& v : inverted.px) v = v ? 0 : 1;
    const ConfusionCounts inv = confusion_counts(inverted, truth, fov);
    CHECK(inv.tp == 0);
    CHECK(inv.tn == 0);

    BinaryMask small(4, 4, 1);
    CHECK_THROWS_AS(confusion_counts(small, truth, fov), InputError);
}

TEST_CASE("f1/accuracy: closed forms and the degenerate guard") {
    CHECK(f1_accuracy({50, 0, 50, 0}).f1 == 1.0);
    CHECK(f1_accuracy({50, 0, 50, 0}).acc == 1.0);

    const F1Acc mixed = f1_accuracy({1, 1, 97, 1});
    CHECK(mixed.f1 == doctest::Approx(0.5));
    CHECK(mixed.acc == doctest::Approx(0.98));  // accuracy stays high while f1 does not

    const F1Acc degen = f1_accuracy({0, 0, 10, 0});
    CHECK(degen.f1 == 0.0);
    CHECK(degen.f1_degenerate);
    CHECK(degen.acc == 1.0);
}

TEST_CASE("roc: perfect ranking gives 1, constant scores give 1/2") {
    std::vector<float> scores;
    std::vector<std::uint8_t> truth;
    Rng rng(2);
    for (int i = 0; i < 100; ++i) {
        const bool pos = rng.bernoulli(0.5);
        truth.push_back(pos);
        scores.push_back(pos ? 1.0f : 0.0f);
    }
    CHECK(roc_auc(scores, truth).auc == doctest::Approx(1.0));

    std::fill(scores.begin(), scores.end(), 0.7f);
    CHECK(roc_auc(scores, truth).auc == doctest::Approx(0.5));

    std::fill(truth.begin(), truth.end(), 1);
    CHECK_THROWS_WITH_AS(roc_auc(scores, truth), doctest::Contains("single class"), InputError);
}

TEST_CASE("roc: trapezoidal AUC equals the pairwise comparison estimate within 1e-9") {
    Rng rng(3);
    std::vector<float> scores(200);
    std::vector<std::uint8_t> truth(200);
    for (int i = 0; i < 200; ++i) {
        truth[i] = rng.bernoulli(0.4);
        scores[i] = static_cast<float>(rng.uniform());
    }
    const RocResult r = roc_auc(scores, truth);

    long double wins = 0;
    std::int64_t pairs = 0;
    for (int i = 0; i < 200; ++i) {
        if (!truth[i]) continue;
        for (int j = 0; j < 200; ++j) {
            if (truth[j]) continue;
            ++pairs;
            if (scores[i] > scores[j])
                wins += 1;
            else if (scores[i] == scores[j])
                wins += 0.5;
        }
    }
    const double mann_whitney = static_cast<double>(wins / pairs);
    CHECK(std::abs(r.auc - mann_whitney) < 1e-9);

    // monotone curve from (0,0) to (1,1)
    CHECK(r.points.front().fpr == 0.0);
    CHECK(r.points.front().tpr == 0.0);
    CHECK(r.points.back().fpr == 1.0);
    CHECK(r.points.back().tpr == 1.0);
    for (std::size_t i = 1; i < r.points.size(); ++i) {
        CHECK(r.points[i].fpr >= r.points[i - 1].fpr);
        CHECK(r.points[i].tpr >= r.points[i - 1].tpr);
    }
    CHECK(r.auc >= 0.0);
    CHECK(r.auc <= 1.0);
}

TEST_CASE("roc: ties collapse to single sweep points in the exact mode") {
    std::vector<float> scores = {0.9f, 0.9f, 0.9f, 0.1f, 0.1f};
    std::vector<std::uint8_t> truth = {1, 1, 0, 0, 1};
    const RocResult r = roc_auc(scores, truth);
    CHECK(r.points.size() == 3);  // (0,0), after 0.9, after 0.1 == (1,1)
    long double wins = 0;
    int pairs = 0;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
            if (!truth[i] || truth[j]) continue;
            ++pairs;
            wins += scores[i] > scores[j] ? 1.0 : (scores[i] == scores[j] ? 0.5 : 0.0);
        }
    CHECK(r.auc == doctest::Approx(static_cast<double>(wins / pairs)).epsilon(1e-12));
}

TEST_CASE("roc: the binned fast mode approximates the exact sweep") {
    Rng rng(4);
    std::vector<float> scores(5000);
    std::vector<std::uint8_t> truth(5000);
    for (std::size_t i = 0; i < scores.size(); ++i) {
        truth[i] = rng.bernoulli(0.3);
        // separable-ish scores so the AUC is away from 0.5
        scores[i] = static_cast<float>(std::clamp(rng.uniform() * 0.7 + (truth[i] ? 0.3 : 0.0), 0.0, 1.0));
    }
    const double exact = roc_auc(scores, truth).auc;
    const double binned = roc_auc(scores, truth, /*bins=*/256).auc;
    CHECK(std::abs(exact - binned) < 5e-3);  // approximate by design
}

TEST_CASE("student t: survival function matches direct quadrature of the density") {
    // Simpson integration of the t pdf as an independent oracle.
    auto t_pdf = [](double x, int dof) {
        const double v = dof;
        return std::exp(std::lgamma((v + 1) / 2) - std::lgamma(v / 2)) / std::sqrt(v * M_PI) *
               std::pow(1 + x * x / v, -(v + 1) / 2);
    };
    for (const auto& [t, dof] : {std::pair{1.0, 4}, {2.5, 4}, {8.0, 4}, {27.0, 4}, {3.0, 9}}) {
        // integrate [t, t+60] with Simpson; tail beyond is negligible at dof>=4
        const int n = 40000;
        const double hi = t + 60.0;
        const double h = (hi - t) / n;
        double s = t_pdf(t, dof) + t_pdf(hi, dof);
        for (int i = 1; i < n; ++i) s += t_pdf(t + i * h, dof) * (i % 2 ? 4.0 : 2.0);
        const double quad = s * h / 3.0;
        CHECK(student_t_sf(t, dof) == doctest::Approx(quad).epsilon(1e-6));
    }
    CHECK(student_t_sf(0.0, 4) == doctest::Approx(0.5));
    CHECK(student_t_sf(-2.0, 6) == doctest::Approx(1.0 - student_t_sf(2.0, 6)).epsilon(1e-12));
}

TEST_CASE("paired t-test: published five-run F1 columns reproduce the stated p-value") {
    const SignificanceResult r = paired_t_test(kBaselineF1, kOursF1);
    CHECK(r.degrees_of_freedom == 4);
    CHECK(r.t_statistic == doctest::Approx(27.056).epsilon(1e-3));
    CHECK(std::abs(r.p_value - 5.55e-6) / 5.55e-6 < 0.05);  // within 5% of the published value
    CHECK(r.reject);
}

TEST_CASE("paired t-test: published AUC columns give p = 6.66e-4 under the standard test") {
    // The published per-run AUC columns do not reproduce the published
    // 3.81e-4 under a paired one-tailed t-test; the value computed from the
    // published numbers is pinned here as the regression constant. The
    // decision (reject at alpha 0.005) is unaffected.
    const SignificanceResult r = paired_t_test(kBaselineAuc, kOursAuc);
    CHECK(r.t_statistic == doctest::Approx(7.9854).epsilon(1e-3));
    CHECK(r.p_value == doctest::Approx(6.66e-4).epsilon(0.01));
    CHECK(r.reject);
}

TEST_CASE("paired t-test: identical samples raise the degenerate-variance error") {
    const std::vector<double> a = {0.5, 0.6, 0.7};
    CHECK_THROWS_WITH_AS(paired_t_test(a, a), doctest::Contains("zero variance"), InputError);
    CHECK_THROWS_AS(paired_t_test({0.1}, {0.2}), InputError);
    CHECK_THROWS_AS(paired_t_test({0.1, 0.2}, {0.2}), InputError);
}

TEST_CASE("paired t-test: decision is invariant to positive scaling of both samples") {
    const SignificanceResult base = paired_t_test(kBaselineF1, kOursF1);
    std::vector<double> a2 = kBaselineF1, b2 = kOursF1;
    for (auto& v : a2) v *= 3.7;
    for (auto& v : b2) v *= 3.7;
    const SignificanceResult scaled = paired_t_test(a2, b2);
    CHECK(scaled.t_statistic == doctest::Approx(base.t_statistic).epsilon(1e-9));
    CHECK(scaled.p_value == doctest::Approx(base.p_value).epsilon(1e-9));
    CHECK(scaled.reject == base.reject);
}

TEST_CASE("fov invariance: values outside the field of view change no metric") {
    Rng rng(5);
    const int n = 24;
    ImageF prob(n, n, 1);
    BinaryMask truth(n, n, 1), fov(n, n, 1), pred(n, n, 1);
    for (int i = 0; i < n * n; ++i) {
        prob.px[i] = static_cast<float>(rng.uniform());
        truth.px[i] = rng.bernoulli(0.3);
        fov.px[i] = rng.bernoulli(0.7);
        pred.px[i] = prob.px[i] >= 0.5f;
    }
    const ConfusionCounts c1 = confusion_counts(pred, truth, fov);
    std::vector<float> s1;
    std::vector<std::uint8_t> l1;
    collect_fov_scores(prob, truth, fov, s1, l1);
    const double auc1 = roc_auc(s1, l1).auc;

    // trash everything outside the fov
    ImageF prob2 = prob;
    BinaryMask truth2 = truth, pred2 = pred;
    for (int i = 0; i < n * n; ++i)
        if (!fov.px[i]) {
            prob2.px[i] = 1.f - prob2.px[i];
            truth2.px[i] = 1 - truth2.px[i];
            pred2.px[i] = 1 - pred2.px[i];
        }
    const ConfusionCounts c2 = confusion_counts(pred2, truth2, fov);
    std::vector<float> s2;
    std::vector<std::uint8_t> l2;
    collect_fov_scores(prob2, truth2, fov, s2, l2);
    CHECK(c1.tp == c2.tp);
    CHECK(c1.fp == c2.fp);
    CHECK(c1.tn == c2.tn);
    CHECK(c1.fn == c2.fn);
    CHECK(roc_auc(s2, l2).auc == auc1);
}

TEST_CASE("threshold sweep: pooled F1 peaks where the scores separate") {
    // Scores drawn so positives sit near 0.8 and negatives near 0.2: F1 at
    // 0.5 must beat F1 at the extremes.
    Rng rng(6);
    std::vector<float> scores;
    std::vector<std::uint8_t> labels;
    for (int i = 0; i < 4000; ++i) {
        const bool pos = rng.bernoulli(0.3);
        labels.push_back(pos);
        scores.push_back(static_cast<float>(std::clamp((pos ? 0.8 : 0.2) + rng.normal() * 0.1, 0.0, 1.0)));
    }
    const auto sweep = threshold_sensitivity(scores, labels, {0.05, 0.5, 0.95});
    REQUIRE(sweep.size() == 3);
    CHECK(sweep[1].f1 > sweep[0].f1);
    CHECK(sweep[1].f1 > sweep[2].f1);
    CHECK(sweep[1].f1 > 0.9);
}

TEST_CASE("ablation report: five-row ladder, injected published cells, missing cells survive") {
    std::map<AblationKey, AblationCell> results;
    results[{false, false, AttentionType::None}] = {0.8202, 0.9793};
    results[{true, false, AttentionType::None}] = {0.8250, 0.9806};
    results[{true, true, AttentionType::None}] = {0.8275, 0.9828};
    results[{true, true, AttentionType::Type1}] = {0.8322, 0.9809};
    results[{true, true, AttentionType::Type2}] = {0.8407, 0.9833};

    const auto rows = ablation_report(results);
    REQUIRE(rows.size() == 5);
    CHECK(rows[0].result->f1 == doctest::Approx(0.8202));
    CHECK(rows[0].result->auc == doctest::Approx(0.9793));
    CHECK(rows[4].result->f1 == doctest::Approx(0.8407));
    CHECK(rows[4].result->auc == doctest::Approx(0.9833));
    CHECK(rows[3].key.attention == AttentionType::Type1);

    results.erase({true, true, AttentionType::Type1});
    const auto partial = ablation_report(results);
    CHECK(!partial[3].result.has_value());
    CHECK(render_ablation_table(partial).find('-') != std::string::npos);

    const auto empty = ablation_report({});
    REQUIRE(empty.size() == 5);
    for (const auto& row : empty) CHECK(!row.result.has_value());
    CHECK(!render_ablation_table(empty).empty());
}

TEST_SUITE_END();
