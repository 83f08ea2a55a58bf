// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include "radp/types.hpp"

namespace radp {

/// P[Bin(trials, p) <= successes], summed in log space for stability.
prec_t binomial_cdf(long trials, long successes, prec_t p);

struct BinomialInterval {
    prec_t lower = 0.0;
    prec_t upper = 1.0;
};

/**
 * Exact Clopper-Pearson confidence interval for a binomial proportion at
 * confidence level 1 - alpha. Endpoints solve the two tail equations
 *
 *   P[Bin(n, p_lower) >= k] = alpha / 2      (0 exactly when k = 0)
 *   P[Bin(n, p_upper) <= k] = alpha / 2      (1 exactly when k = n)
 *
 * by bisection on the binomial CDF, to within 1e-10.
 */
BinomialInterval clopper_pearson(long successes, long trials, prec_t alpha);

}  // namespace radp
