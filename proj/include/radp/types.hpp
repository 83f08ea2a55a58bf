// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <vector>

namespace radp {

/// Default precision used throughout the library.
using prec_t = double;

/// Dense vector of values.
using numvec = std::vector<prec_t>;

/// Dense vector of indices.
using indvec = std::vector<long>;

/// Deterministic policy: one action index per non-terminal state.
using Policy = indvec;

/// Tolerance for validating that stored data are probability distributions.
constexpr prec_t DISTRIBUTION_TOL = 1e-12;

/// Tolerance for runtime membership checks (allows float drift).
constexpr prec_t MEMBERSHIP_TOL = 1e-9;

/// Weight-vector sup-norm beyond which an iteration is declared divergent.
constexpr prec_t DIVERGENCE_NORM = 1e9;

/// Condition-number estimate above which a feature Gram matrix is rejected.
constexpr prec_t CONDITION_LIMIT = 1e12;

}  // namespace radp
