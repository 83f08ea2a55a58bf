// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "radp/features.hpp"
#include "radp/model.hpp"
#include "radp/types.hpp"

namespace radp {

/**
 * Exploration transition kernel: one row per non-terminal state, columns over
 * the full outcome space (non-terminals then terminals). The exploration
 * policy is already folded in.
 */
struct ExplorationKernel {
    Eigen::MatrixXd transitions;

    long num_states() const { return transitions.rows(); }
    long num_terminals() const { return transitions.cols() - transitions.rows(); }

    std::vector<std::string> invariant_violations() const;
};

/// Stationary distribution of an ergodic terminal-free kernel, by power
/// iteration. Non-convergence (reducible or periodic chain) raises an error,
/// as does any zero stationary weight.
numvec stationary_weights(const ExplorationKernel& kernel, prec_t tol = 1e-13,
                          long max_iters = 200000);

/// Expected visit counts d = start' (I - P_X)^{-1} for a proper kernel with
/// terminal states. Errors on a singular system (improper kernel) or any
/// unreached state.
numvec visit_weights(const ExplorationKernel& kernel, const numvec& start_distribution);

struct Assumption2Report {
    bool holds = false;
    prec_t beta = 0.0;
    long witness_state = -1;   // x achieving the max ratio
    long witness_next = -1;    // x' achieving the max ratio
};

/**
 * Largest ratio discount * sup_P P(x'|x,u) / kernel(x'|x) over non-terminal
 * x', with 0/0 counted as 0 and positive/0 as infinity. Transitions into
 * terminal states are exempt. With policy_aware the check runs only at
 * u = policy[x]; otherwise over every action, so that a pass covers every
 * policy at once.
 */
Assumption2Report check_assumption2(const RobustMdp& model, const Policy& policy,
                                    const ExplorationKernel& kernel, bool policy_aware = true);

/// d-weighted Euclidean norm.
prec_t weighted_norm(const numvec& values, const numvec& weights);

/// Least-squares weights of the projection of `values` onto span(phi) in the
/// d-weighted norm. Errors when the Gram matrix is ill-conditioned.
Eigen::VectorXd fit_projection(const numvec& values, const Eigen::MatrixXd& phi, const numvec& weights);

/// The projected vector itself: phi * fit_projection(...).
numvec project(const numvec& values, const Eigen::MatrixXd& phi, const numvec& weights);

/**
 * Robust projected value iteration with exact matrices:
 *
 *   w_{k+1} = (Phi' D Phi)^{-1} (Phi' D r + discount * Phi' D sigma_pi(Phi w_k))
 *
 * from w_0 = 0 until the sup-norm step is below tol. Raises DivergenceError
 * when the iterate norm passes DIVERGENCE_NORM and NonConvergenceError when
 * the budget runs out.
 */
Eigen::VectorXd rpvi_exact(const RobustMdp& model, const Policy& policy, const Eigen::MatrixXd& phi,
                           const numvec& weights, prec_t tol = 1e-10, long max_iters = 100000);

/// Max over random pairs (y, z) of |Pi T y - Pi T z|_d / |y - z|_d; pairs
/// closer than 1e-12 in the d-norm are skipped.
prec_t contraction_probe(const RobustMdp& model, const Policy& policy, const Eigen::MatrixXd& phi,
                         const numvec& weights, long trials, std::uint64_t seed);

}  // namespace radp
