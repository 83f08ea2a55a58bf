// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <utility>
#include <vector>

#include "radp/features.hpp"
#include "radp/linear_fa.hpp"
#include "radp/model.hpp"
#include "radp/types.hpp"

namespace radp {

/// One sampled transition. `next` indexes the full outcome space; `terminal`
/// marks arrivals in a terminal state (the episode then restarts).
struct Step {
    long time = 0;
    long state = 0;
    long action = 0;
    prec_t reward = 0.0;
    long next = 0;
    bool terminal = false;
};

struct Trajectory {
    std::vector<Step> steps;
    long episodes = 1;
};

/**
 * Sample num_steps transitions under the exploration kernel, recording the
 * policy's action and reward at each visited state. With terminal states the
 * walk restarts from the start distribution whenever it is absorbed; without
 * them it is one unbroken path. Reproducible given the seed.
 */
Trajectory generate_trajectory(const RobustMdp& model, const ExplorationKernel& kernel,
                               const Policy& policy, const numvec& start_distribution,
                               std::uint64_t seed, long num_steps);

/// Synthetic data visiting every (state, action) pair exactly once, giving
/// estimators the exhaustive uniform weighting. Next states are drawn from
/// the default nominal distributions.
Trajectory exhaustive_pairs(const RobustMdp& model, std::uint64_t seed);

/// Columnar dump: one "t x u r x' terminal" record per line.
void save_trajectory(std::ostream& out, const Trajectory& trajectory);
Trajectory load_trajectory(std::istream& in);

/**
 * Sample-average estimates of the projected-equation matrices, built from
 * state features:
 *
 *   gram    ~ (1/W) sum phi(x_t) phi(x_t)'
 *   reward  ~ (1/W) sum phi(x_t) r(x_t, u_t)
 *   sigma_term(w) ~ (1/W) sum phi(x_t) sigma_{P(x_t, u_t)}(Phi w)
 *
 * W is the step count without terminal states and the episode count with
 * them, matching the visit-count weighting of the projection weights.
 * Storage is grouped by the distinct (state, action) handles in the data;
 * features per sample and set handles are all that is kept.
 */
class SampledMatrices {
public:
    SampledMatrices(const Trajectory& trajectory, const FeatureMap& features, const RobustMdp& model);

    const Eigen::MatrixXd& gram() const { return gram_; }
    const Eigen::VectorXd& reward() const { return reward_; }
    Eigen::VectorXd sigma_term(const Eigen::VectorXd& w) const;

    prec_t discount() const { return discount_; }
    prec_t weight() const { return weight_; }
    long dim() const { return gram_.rows(); }

    /// Gram condition estimate; rank_deficient flags it for the caller to
    /// decide on regularization before solving.
    prec_t condition() const { return condition_; }
    bool rank_deficient() const { return condition_ > CONDITION_LIMIT; }

private:
    Eigen::MatrixXd gram_;
    Eigen::VectorXd reward_;
    Eigen::MatrixXd handle_features_;             // one aggregated phi-sum row per handle
    std::vector<std::pair<long, long>> handles_;  // distinct (state, action)
    Eigen::MatrixXd value_features_;              // phi rows over all states, for Phi w
    const RobustMdp* model_;
    prec_t discount_;
    prec_t weight_;
    prec_t condition_;
};

/// Estimator construction per the sample averages above.
SampledMatrices estimate_matrices(const Trajectory& trajectory, const FeatureMap& features,
                                  const RobustMdp& model);

/// Sampled robust projected value iteration:
/// w_{k+1} = gram^{-1} (reward + discount * sigma_term(w_k)) from w_0 = 0.
Eigen::VectorXd rpvi_sampled(const SampledMatrices& matrices, prec_t tol = 1e-10,
                             long max_iters = 100000);

}  // namespace radp
