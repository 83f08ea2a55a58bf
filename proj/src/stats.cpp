// Apache License, Version 2.0, refer to LICENSE.txt
#include "radp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace radp {

namespace {

/// Continued-fraction backbone of the incomplete beta function
/// (Lentz's method, as in the standard numerical treatments).
prec_t beta_continued_fraction(prec_t a, prec_t b, prec_t x) {
    constexpr int max_iters = 300;
    constexpr prec_t eps = std::numeric_limits<prec_t>::epsilon();
    constexpr prec_t tiny = 1e-300;

    const prec_t qab = a + b;
    const prec_t qap = a + 1.0;
    const prec_t qam = a - 1.0;
    prec_t c = 1.0;
    prec_t d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    prec_t h = d;
    for (int m = 1; m <= max_iters; m++) {
        const int m2 = 2 * m;
        prec_t aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const prec_t del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 10.0 * eps) return h;
    }
    return h;  // converged to working precision in practice well before this
}

}  // namespace

prec_t regularized_incomplete_beta(prec_t a, prec_t b, prec_t x) {
    if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("incomplete beta: a, b must be > 0");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;

    const prec_t log_front =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    const prec_t front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

prec_t student_t_cdf(prec_t t, prec_t dof) {
    if (dof <= 0.0) throw std::invalid_argument("student_t_cdf: dof must be > 0");
    const prec_t x = dof / (dof + t * t);
    const prec_t tail = 0.5 * regularized_incomplete_beta(0.5 * dof, 0.5, x);
    return t >= 0.0 ? 1.0 - tail : tail;
}

prec_t percentile_nearest_rank(numvec sample, long pct) {
    if (sample.empty()) throw std::invalid_argument("percentile of empty sample");
    if (pct < 1 || pct > 100) throw std::invalid_argument("percentile must lie in 1..100");
    std::sort(sample.begin(), sample.end());
    const long n = static_cast<long>(sample.size());
    const long rank = (pct * n + 99) / 100;  // ceil(pct/100 * n) for integer pct
    return sample[rank - 1];
}

PairedTTest paired_t_test(const numvec& a, const numvec& b) {
    if (a.size() != b.size() || a.size() < 2)
        throw std::invalid_argument("paired_t_test needs two samples of equal length >= 2");

    PairedTTest res;
    res.n = static_cast<long>(a.size());
    prec_t mean = 0.0;
    for (std::size_t i = 0; i < a.size(); i++) mean += a[i] - b[i];
    mean /= static_cast<prec_t>(res.n);

    prec_t var = 0.0;
    for (std::size_t i = 0; i < a.size(); i++) {
        const prec_t d = a[i] - b[i] - mean;
        var += d * d;
    }
    var /= static_cast<prec_t>(res.n - 1);

    res.mean_difference = mean;
    if (var <= 0.0) {
        res.t_statistic = mean == 0.0 ? 0.0 : std::numeric_limits<prec_t>::infinity() * (mean > 0 ? 1 : -1);
        res.p_value = mean == 0.0 ? 1.0 : 0.0;
        return res;
    }
    res.t_statistic = mean / std::sqrt(var / static_cast<prec_t>(res.n));
    const prec_t dof = static_cast<prec_t>(res.n - 1);
    res.p_value = 2.0 * (1.0 - student_t_cdf(std::abs(res.t_statistic), dof));
    return res;
}

}  // namespace radp
