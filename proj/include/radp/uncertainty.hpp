// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <string>
#include <vector>

#include "radp/types.hpp"

namespace radp {

enum class SetKind { singleton, interval_box, vertex_list };

const char* to_string(SetKind kind);

/**
 * Set of admissible next-state distributions for one (state, action) pair.
 *
 * Three variants are supported:
 *  - singleton:    a single distribution p (no uncertainty),
 *  - interval_box: { p : lo <= p <= hi, sum(p) = 1 } componentwise,
 *  - vertex_list:  the convex hull of an explicit list of distributions.
 *
 * Vectors are indexed over the full outcome space (non-terminal states
 * followed by terminal states). For the vertex-list variant the membership
 * predicate recognizes the listed vertices; minimizers of linear functions
 * over the hull are always vertices, so that is the only membership the
 * library ever needs to certify.
 */
class UncertaintySet {
public:
    static UncertaintySet singleton(numvec p);
    static UncertaintySet interval_box(numvec lo, numvec hi);
    static UncertaintySet vertex_list(std::vector<numvec> vertices);

    SetKind kind() const { return kind_; }
    long dim() const { return dim_; }

    /// Singleton distribution. Valid only for the singleton variant.
    const numvec& point() const;
    /// Componentwise bounds. Valid only for the interval-box variant.
    const numvec& lower() const;
    const numvec& upper() const;
    /// Vertex distributions. Valid only for the vertex-list variant.
    const std::vector<numvec>& vertices() const;

    /// Membership predicate (tolerance per component and on the total mass).
    bool contains(const numvec& p, prec_t tol = MEMBERSHIP_TOL) const;

    /// sup over the set of the mass assigned to outcome i.
    prec_t max_mass(long i) const;

    /// Human-readable invariant violations; empty when well-formed.
    std::vector<std::string> invariant_violations() const;

private:
    UncertaintySet(SetKind kind, long dim, std::vector<numvec> data)
        : kind_(kind), dim_(dim), data_(std::move(data)) {}

    SetKind kind_;
    long dim_;
    std::vector<numvec> data_;
};

}  // namespace radp
