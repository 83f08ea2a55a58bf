// Apache License, Version 2.0, refer to LICENSE.txt
#include "radp/sigma.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "radp/errors.hpp"

namespace radp {

namespace {

void check_dim(std::size_t a, std::size_t b, const char* what) {
    if (a != b) throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

}  // namespace

SigmaResult sigma_singleton(const numvec& values, const numvec& p) {
    check_dim(values.size(), p.size(), "sigma_singleton");
    SigmaResult res;
    res.value = std::inner_product(values.begin(), values.end(), p.begin(), prec_t(0));
    res.minimizer = p;
    return res;
}

SigmaResult sigma_interval(const numvec& values, const numvec& lo, const numvec& hi) {
    check_dim(values.size(), lo.size(), "sigma_interval");
    check_dim(values.size(), hi.size(), "sigma_interval");
    const long n = static_cast<long>(values.size());

    const prec_t lo_sum = std::accumulate(lo.begin(), lo.end(), prec_t(0));
    const prec_t hi_sum = std::accumulate(hi.begin(), hi.end(), prec_t(0));
    if (lo_sum > 1.0 + MEMBERSHIP_TOL || hi_sum < 1.0 - MEMBERSHIP_TOL)
        throw ValidationError("sigma_interval: infeasible box (need sum(lo) <= 1 <= sum(hi))");

    indvec order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](long a, long b) {
        if (values[a] != values[b]) return values[a] < values[b];
        return a < b;
    });

    numvec p = lo;
    prec_t remaining = 1.0 - lo_sum;
    for (long idx : order) {
        if (remaining <= 0.0) break;
        const prec_t add = std::min(hi[idx] - lo[idx], remaining);
        p[idx] += add;
        remaining -= add;
    }

    SigmaResult res;
    res.value = std::inner_product(values.begin(), values.end(), p.begin(), prec_t(0));
    res.minimizer = std::move(p);
    return res;
}

SigmaResult sigma_vertices(const numvec& values, const std::vector<numvec>& vertices) {
    if (vertices.empty()) throw std::invalid_argument("sigma_vertices: empty vertex list");
    SigmaResult res;
    res.value = std::numeric_limits<prec_t>::infinity();
    for (const numvec& v : vertices) {
        check_dim(values.size(), v.size(), "sigma_vertices");
        const prec_t dot = std::inner_product(values.begin(), values.end(), v.begin(), prec_t(0));
        if (dot < res.value) {
            res.value = dot;
            res.minimizer = v;
        }
    }
    return res;
}

SigmaResult sigma_set(const numvec& values, const UncertaintySet& set) {
    switch (set.kind()) {
    case SetKind::singleton: return sigma_singleton(values, set.point());
    case SetKind::interval_box: return sigma_interval(values, set.lower(), set.upper());
    case SetKind::vertex_list: return sigma_vertices(values, set.vertices());
    }
    throw std::logic_error("sigma_set: unknown variant");
}

SigmaResult sigma_oracle(const numvec& values, const UncertaintySet& set) {
    if (set.kind() != SetKind::interval_box) return sigma_set(values, set);

    const long n = set.dim();
    if (n > 12) throw std::invalid_argument("sigma_oracle: support too large for enumeration");
    const numvec& lo = set.lower();
    const numvec& hi = set.upper();

    const prec_t lo_sum = std::accumulate(lo.begin(), lo.end(), prec_t(0));
    const prec_t hi_sum = std::accumulate(hi.begin(), hi.end(), prec_t(0));
    if (lo_sum > 1.0 + MEMBERSHIP_TOL || hi_sum < 1.0 - MEMBERSHIP_TOL)
        throw ValidationError("sigma_oracle: infeasible box");

    // Vertices of { lo <= p <= hi, sum(p) = 1 }: every coordinate at a bound
    // except at most one fractional coordinate that absorbs the slack.
    SigmaResult best;
    best.value = std::numeric_limits<prec_t>::infinity();
    numvec p(n);
    const std::uint64_t masks = std::uint64_t(1) << n;
    for (std::uint64_t mask = 0; mask < masks; mask++) {
        prec_t total = 0.0;
        for (long i = 0; i < n; i++) {
            p[i] = (mask >> i) & 1 ? hi[i] : lo[i];
            total += p[i];
        }
        // All-at-bounds candidate.
        if (std::abs(total - 1.0) <= 1e-12) {
            const prec_t dot = std::inner_product(values.begin(), values.end(), p.begin(), prec_t(0));
            if (dot < best.value) {
                best.value = dot;
                best.minimizer = p;
            }
        }
        // One fractional coordinate.
        for (long j = 0; j < n; j++) {
            const prec_t frac = 1.0 - (total - p[j]);
            if (frac < lo[j] - 1e-12 || frac > hi[j] + 1e-12) continue;
            const prec_t saved = p[j];
            p[j] = frac;
            const prec_t dot = std::inner_product(values.begin(), values.end(), p.begin(), prec_t(0));
            if (dot < best.value) {
                best.value = dot;
                best.minimizer = p;
            }
            p[j] = saved;
        }
    }
    return best;
}

}  // namespace radp
