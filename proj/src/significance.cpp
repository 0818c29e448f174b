#include "awnet/eval/significance.hpp"

#include <cmath>

namespace awnet {

namespace {

// Continued-fraction evaluation of the incomplete beta (modified Lentz).
double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-16, kFpMin = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    if (x < 0.0 || x > 1.0) throw InputError("incomplete beta: x outside [0,1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                            b * std::log(1.0 - x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double student_t_sf(double t, int dof) {
    if (dof < 1) throw InputError("student t: dof must be >= 1");
    const double v = static_cast<double>(dof);
    const double x = v / (v + t * t);
    const double half_two_sided = 0.5 * regularized_incomplete_beta(v / 2.0, 0.5, x);
    return t >= 0.0 ? half_two_sided : 1.0 - half_two_sided;
}

SignificanceResult paired_t_test(const std::vector<double>& a, const std::vector<double>& b, double alpha) {
    if (a.size() != b.size()) throw InputError("paired_t_test: sample sizes differ");
    const int n = static_cast<int>(a.size());
    if (n < 2) throw InputError("paired_t_test: need at least 2 pairs");

    double mean_d = 0.0;
    for (int i = 0; i < n; ++i) mean_d += b[i] - a[i];
    mean_d /= n;
    double ss = 0.0;
    for (int i = 0; i < n; ++i) {
        const double dev = (b[i] - a[i]) - mean_d;
        ss += dev * dev;
    }
    if (ss <= 0.0)
        throw InputError("paired_t_test: differences have zero variance (degenerate sample)");
    const double sd = std::sqrt(ss / (n - 1));
    const double se = sd / std::sqrt(static_cast<double>(n));

    SignificanceResult r;
    r.sample_a = a;
    r.sample_b = b;
    r.t_statistic = mean_d / se;
    r.degrees_of_freedom = n - 1;
    r.p_value = student_t_sf(r.t_statistic, r.degrees_of_freedom);
    r.alpha = alpha;
    r.reject = r.p_value < alpha;
    return r;
}

}  // namespace awnet
