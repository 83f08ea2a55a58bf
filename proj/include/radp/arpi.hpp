// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "radp/features.hpp"
#include "radp/model.hpp"
#include "radp/sampling.hpp"
#include "radp/types.hpp"

namespace radp {

/// Sample averages over state-action features:
///   gram   ~ (1/W) sum phi(x_t, u_t) phi(x_t, u_t)'
///   reward ~ (1/W) sum phi(x_t, u_t) r(x_t, u_t)
/// plus grouped storage for the sigma term of the inner iteration. Built
/// once per data set and reused across all outer iterations.
class SaSampledMatrices {
public:
    SaSampledMatrices(const Trajectory& trajectory, const StateActionFeatureMap& features,
                      const RobustMdp& model);

    const Eigen::MatrixXd& gram() const { return gram_; }
    const Eigen::VectorXd& reward() const { return reward_; }

    /// (1/W) sum phi(x_t, u_t) sigma_{P(x_t, u_t)}(values), where `values`
    /// holds one entry per non-terminal state (the greedy next-state values).
    Eigen::VectorXd sigma_term(const numvec& state_values) const;

    prec_t discount() const { return discount_; }
    prec_t weight() const { return weight_; }
    long dim() const { return gram_.rows(); }
    const std::vector<long>& sampled_states() const { return sampled_states_; }

    prec_t condition() const { return condition_; }
    bool rank_deficient() const { return condition_ > CONDITION_LIMIT; }

private:
    Eigen::MatrixXd gram_;
    Eigen::VectorXd reward_;
    Eigen::MatrixXd handle_features_;
    std::vector<std::pair<long, long>> handles_;
    std::vector<long> sampled_states_;  // distinct states appearing in the data
    const RobustMdp* model_;
    prec_t discount_;
    prec_t weight_;
    prec_t condition_;
};

SaSampledMatrices estimate_sa_matrices(const Trajectory& trajectory,
                                       const StateActionFeatureMap& features,
                                       const RobustMdp& model);

/// Greedy policy of a state-action weight vector: argmax_u phi(x, u)' w,
/// ties toward the lowest action index.
Policy greedy_policy(const Eigen::VectorXd& w, const StateActionFeatureMap& features,
                     long num_states, long num_actions);

/**
 * Inner policy-evaluation iteration:
 *
 *   theta_{j+1} = gram^{-1} (reward + discount * sigma_term(Phi*_target theta_j))
 *
 * where Phi*_target has rows phi(x, target[x]). Runs until the sup-norm step
 * is at most tol; reports the iteration count through `iterations` when
 * non-null.
 */
Eigen::VectorXd arpi_inner(const SaSampledMatrices& matrices, const StateActionFeatureMap& features,
                           const Policy& target, const Eigen::VectorXd& theta0, prec_t tol,
                           long max_iters, long* iterations = nullptr);

struct ArpiIterationDiag {
    long outer = 0;
    long inner_iterations = 0;
    prec_t inner_residual = 0.0;
    long policy_changes = 0;  // greedy-action changes on sampled states
};

struct ArpiResult {
    Eigen::VectorXd weights;
    Policy policy;
    std::vector<ArpiIterationDiag> diagnostics;
    bool converged = false;  // greedy policy repeated on sampled states
};

/**
 * Approximate robust policy iteration. The outer loop evaluates the greedy
 * policy of the current weights with arpi_inner (warm-started at the current
 * weights) and stops when the greedy actions repeat on every sampled state
 * or the outer budget runs out; cycling is reported, not raised.
 */
ArpiResult arpi(const Trajectory& trajectory, const StateActionFeatureMap& features,
                const RobustMdp& model, prec_t inner_tol = 1e-9, long inner_max_iters = 100000,
                long outer_max_iters = 30);

}  // namespace radp
