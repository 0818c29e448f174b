#pragma once

#include <vector>

#include "awnet/errors.hpp"

namespace awnet {

struct SignificanceResult {
    std::vector<double> sample_a, sample_b;
    double t_statistic = 0.0;
    int degrees_of_freedom = 0;
    double p_value = 0.0;  // one-tailed, H1: mean(b) > mean(a)
    double alpha = 0.005;
    bool reject = false;
};

// Paired one-tailed t-test on n matched runs: d = b - a,
// t = mean(d) / (sd(d) / sqrt(n)), dof = n - 1. Throws InputError for
// mismatched/short samples and when the differences have zero variance.
SignificanceResult paired_t_test(const std::vector<double>& a, const std::vector<double>& b,
                                 double alpha = 0.005);

// Upper-tail probability P(T_dof > t) via the regularised incomplete beta
// function (no external statistics dependency).
double student_t_sf(double t, int dof);

double regularized_incomplete_beta(double a, double b, double x);

}  // namespace awnet
