// Apache License, Version 2.0, refer to LICENSE.txt
#include "radp/uncertainty.hpp"

#include <cmath>
#include <cstdlib>
#include <numeric>
#include <stdexcept>

namespace radp {

const char* to_string(SetKind kind) {
    switch (kind) {
    case SetKind::singleton: return "singleton";
    case SetKind::interval_box: return "interval_box";
    case SetKind::vertex_list: return "vertex_list";
    }
    return "unknown";
}

namespace {

prec_t sum(const numvec& v) { return std::accumulate(v.begin(), v.end(), prec_t(0)); }

bool is_distribution(const numvec& p, prec_t tol) {
    for (prec_t x : p)
        if (!(x >= -tol) || !std::isfinite(x)) return false;
    return std::abs(sum(p) - 1.0) <= tol;
}

}  // namespace

UncertaintySet UncertaintySet::singleton(numvec p) {
    const long dim = static_cast<long>(p.size());
    return UncertaintySet(SetKind::singleton, dim, {std::move(p)});
}

UncertaintySet UncertaintySet::interval_box(numvec lo, numvec hi) {
    if (lo.size() != hi.size())
        throw std::invalid_argument("interval_box: lo and hi dimension mismatch");
    const long dim = static_cast<long>(lo.size());
    return UncertaintySet(SetKind::interval_box, dim, {std::move(lo), std::move(hi)});
}

UncertaintySet UncertaintySet::vertex_list(std::vector<numvec> vertices) {
    if (vertices.empty()) throw std::invalid_argument("vertex_list: empty vertex list");
    const long dim = static_cast<long>(vertices.front().size());
    for (const numvec& v : vertices)
        if (static_cast<long>(v.size()) != dim)
            throw std::invalid_argument("vertex_list: inconsistent vertex dimensions");
    return UncertaintySet(SetKind::vertex_list, dim, std::move(vertices));
}

const numvec& UncertaintySet::point() const {
    if (kind_ != SetKind::singleton) throw std::logic_error("point(): not a singleton set");
    return data_[0];
}

const numvec& UncertaintySet::lower() const {
    if (kind_ != SetKind::interval_box) throw std::logic_error("lower(): not an interval box");
    return data_[0];
}

const numvec& UncertaintySet::upper() const {
    if (kind_ != SetKind::interval_box) throw std::logic_error("upper(): not an interval box");
    return data_[1];
}

const std::vector<numvec>& UncertaintySet::vertices() const {
    if (kind_ != SetKind::vertex_list) throw std::logic_error("vertices(): not a vertex list");
    return data_;
}

bool UncertaintySet::contains(const numvec& p, prec_t tol) const {
    if (static_cast<long>(p.size()) != dim_) return false;
    if (std::abs(sum(p) - 1.0) > tol) return false;
    for (prec_t x : p)
        if (x < -tol) return false;

    switch (kind_) {
    case SetKind::singleton: {
        const numvec& q = data_[0];
        for (long i = 0; i < dim_; i++)
            if (std::abs(p[i] - q[i]) > tol) return false;
        return true;
    }
    case SetKind::interval_box: {
        const numvec& lo = data_[0];
        const numvec& hi = data_[1];
        for (long i = 0; i < dim_; i++)
            if (p[i] < lo[i] - tol || p[i] > hi[i] + tol) return false;
        return true;
    }
    case SetKind::vertex_list: {
        for (const numvec& q : data_) {
            bool match = true;
            for (long i = 0; i < dim_ && match; i++)
                if (std::abs(p[i] - q[i]) > tol) match = false;
            if (match) return true;
        }
        return false;
    }
    }
    return false;
}

prec_t UncertaintySet::max_mass(long i) const {
    switch (kind_) {
    case SetKind::singleton: return data_[0][i];
    case SetKind::interval_box: return data_[1][i];
    case SetKind::vertex_list: {
        prec_t best = 0.0;
        for (const numvec& v : data_) best = std::max(best, v[i]);
        return best;
    }
    }
    return 0.0;
}

std::vector<std::string> UncertaintySet::invariant_violations() const {
    std::vector<std::string> out;
    switch (kind_) {
    case SetKind::singleton:
        if (!is_distribution(data_[0], DISTRIBUTION_TOL))
            out.push_back("singleton p is not a probability distribution");
        break;
    case SetKind::interval_box: {
        const numvec& lo = data_[0];
        const numvec& hi = data_[1];
        for (long i = 0; i < dim_; i++) {
            if (lo[i] < -DISTRIBUTION_TOL || hi[i] > 1.0 + DISTRIBUTION_TOL || lo[i] > hi[i] + DISTRIBUTION_TOL) {
                out.push_back("interval box bounds violate 0 <= lo <= hi <= 1 at coordinate " +
                              std::to_string(i));
                break;
            }
        }
        if (sum(lo) > 1.0 + DISTRIBUTION_TOL) out.push_back("sum(lo) > 1");
        if (sum(hi) < 1.0 - DISTRIBUTION_TOL) out.push_back("sum(hi) < 1");
        break;
    }
    case SetKind::vertex_list:
        for (std::size_t k = 0; k < data_.size(); k++)
            if (!is_distribution(data_[k], DISTRIBUTION_TOL))
                out.push_back("vertex " + std::to_string(k) + " is not a probability distribution");
        break;
    }
    return out;
}

}  // namespace radp
