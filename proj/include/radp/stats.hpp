// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include "radp/types.hpp"

namespace radp {

/// Regularized incomplete beta function I_x(a, b).
prec_t regularized_incomplete_beta(prec_t a, prec_t b, prec_t x);

/// CDF of Student's t distribution with `dof` degrees of freedom.
prec_t student_t_cdf(prec_t t, prec_t dof);

/// Nearest-rank percentile of the sample (pct in 1..100). Sorts a copy.
prec_t percentile_nearest_rank(numvec sample, long pct);

struct PairedTTest {
    long n = 0;
    prec_t mean_difference = 0.0;
    prec_t t_statistic = 0.0;
    prec_t p_value = 1.0;  // two-sided
};

/// Two-sided paired t-test of a - b. Zero-variance differences map to
/// p = 1 when the mean difference is zero and p = 0 otherwise.
PairedTTest paired_t_test(const numvec& a, const numvec& b);

}  // namespace radp
