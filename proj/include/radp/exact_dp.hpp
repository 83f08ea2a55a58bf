// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include "radp/model.hpp"
#include "radp/types.hpp"

namespace radp {

/// Iteration budget from the geometric-convergence bound, with margin.
/// Requires discount < 1; pass an explicit budget for undiscounted models.
long geometric_iteration_bound(prec_t discount, prec_t tol);

/// Reward vector of a fixed policy: r(x, pi(x)).
numvec policy_reward(const RobustMdp& model, const Policy& policy);

/// Worst-case expected next value per state for a fixed policy. `padded`
/// must already carry zeros on terminal coordinates.
numvec sigma_pi(const RobustMdp& model, const Policy& policy, const numvec& padded);

/// One application of the robust Bellman operator for a fixed policy.
numvec apply_T_pi(const RobustMdp& model, const Policy& policy, const numvec& values);

/// Fixed-point iteration on the fixed-policy robust Bellman operator to the
/// given sup-norm residual. max_iters = 0 derives the budget from the
/// discount (which must then be < 1).
numvec evaluate_policy_exact(const RobustMdp& model, const Policy& policy, prec_t tol = 1e-10,
                             long max_iters = 0);

/// Greedy policy with respect to a value vector; ties break toward the
/// lowest action index.
Policy greedy_policy_exact(const RobustMdp& model, const numvec& values);

struct ExactSolution {
    numvec value;
    Policy policy;
    prec_t residual = 0.0;
    long iterations = 0;
};

/// Robust value iteration with the sup-over-actions operator.
ExactSolution solve_optimal_exact(const RobustMdp& model, prec_t tol = 1e-10, long max_iters = 0);

/// Alternate exact policy evaluation and greedy improvement until the policy
/// is stable. Errors out after max_policy_updates improvements.
ExactSolution robust_policy_iteration(const RobustMdp& model, prec_t tol = 1e-10,
                                      long max_policy_updates = 10000);

}  // namespace radp
