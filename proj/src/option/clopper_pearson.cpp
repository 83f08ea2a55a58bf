// Apache License, Version 2.0, refer to LICENSE.txt
#include "radp/option/clopper_pearson.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace radp {

namespace {

prec_t log_choose(long n, long k) {
    return std::lgamma(static_cast<prec_t>(n + 1)) - std::lgamma(static_cast<prec_t>(k + 1)) -
           std::lgamma(static_cast<prec_t>(n - k + 1));
}

}  // namespace

prec_t binomial_cdf(long trials, long successes, prec_t p) {
    if (successes < 0) return 0.0;
    if (successes >= trials) return 1.0;
    if (p <= 0.0) return 1.0;
    if (p >= 1.0) return 0.0;

    const prec_t log_p = std::log(p);
    const prec_t log_q = std::log1p(-p);
    // Accumulate max-shifted log terms to avoid underflow in either tail.
    prec_t max_log = -std::numeric_limits<prec_t>::infinity();
    numvec logs(successes + 1);
    for (long i = 0; i <= successes; i++) {
        logs[i] = log_choose(trials, i) + i * log_p + (trials - i) * log_q;
        max_log = std::max(max_log, logs[i]);
    }
    prec_t total = 0.0;
    for (long i = 0; i <= successes; i++) total += std::exp(logs[i] - max_log);
    return std::min(prec_t(1), std::exp(max_log) * total);
}

BinomialInterval clopper_pearson(long successes, long trials, prec_t alpha) {
    if (trials < 1) throw std::invalid_argument("clopper_pearson: trials must be >= 1");
    if (successes < 0 || successes > trials)
        throw std::invalid_argument("clopper_pearson: successes must lie in 0..trials");
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw std::invalid_argument("clopper_pearson: alpha must lie in (0, 1)");

    const prec_t tail = 0.5 * alpha;
    BinomialInterval interval;

    if (successes == 0) {
        interval.lower = 0.0;
    } else {
        // P[Bin(n,p) >= k] = tail  <=>  CDF(k-1, p) = 1 - tail, decreasing in p.
        prec_t lo = 0.0, hi = 1.0;
        while (hi - lo > 1e-10) {
            const prec_t mid = 0.5 * (lo + hi);
            if (binomial_cdf(trials, successes - 1, mid) > 1.0 - tail)
                lo = mid;
            else
                hi = mid;
        }
        interval.lower = 0.5 * (lo + hi);
    }

    if (successes == trials) {
        interval.upper = 1.0;
    } else {
        // CDF(k, p) = tail, decreasing in p.
        prec_t lo = 0.0, hi = 1.0;
        while (hi - lo > 1e-10) {
            const prec_t mid = 0.5 * (lo + hi);
            if (binomial_cdf(trials, successes, mid) > tail)
                lo = mid;
            else
                hi = mid;
        }
        interval.upper = 0.5 * (lo + hi);
    }
    return interval;
}

}  // namespace radp
