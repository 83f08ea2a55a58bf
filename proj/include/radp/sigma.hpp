// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include "radp/types.hpp"
#include "radp/uncertainty.hpp"

namespace radp {

/// Result of the inner minimization min { p . v : p in set }.
struct SigmaResult {
    prec_t value = 0.0;
    numvec minimizer;  // distribution achieving the value
};

/// Singleton set: the plain expectation p . v.
SigmaResult sigma_singleton(const numvec& values, const numvec& p);

/**
 * Exact minimum of p . v over { lo <= p <= hi, sum(p) = 1 }.
 *
 * Sort-greedy: start from lo and hand the remaining mass 1 - sum(lo) to
 * coordinates in ascending value order, each capped at hi. Ties in the value
 * ordering break by coordinate index, which pins down the minimizer (the
 * value is unaffected).
 */
SigmaResult sigma_interval(const numvec& values, const numvec& lo, const numvec& hi);

/// Minimum over an explicit vertex list; ties break toward the lowest index.
SigmaResult sigma_vertices(const numvec& values, const std::vector<numvec>& vertices);

/// Dispatch on the set variant.
SigmaResult sigma_set(const numvec& values, const UncertaintySet& set);

/**
 * Brute-force oracle. For interval boxes, enumerates every vertex of the
 * polytope { lo <= p <= hi, sum(p) = 1 } (at most one coordinate strictly
 * between its bounds) and returns the exact minimum. Other variants defer to
 * the direct operation. Supports dimension <= 12.
 */
SigmaResult sigma_oracle(const numvec& values, const UncertaintySet& set);

}  // namespace radp
