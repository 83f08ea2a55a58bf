// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "radp/arpi.hpp"
#include "radp/linear_fa.hpp"
#include "radp/model.hpp"
#include "radp/option/clopper_pearson.hpp"
#include "radp/sigma.hpp"
#include "radp/types.hpp"

namespace radp {

/// Multiplicative binomial price process: each step multiplies the price by
/// up_factor with probability up_prob, else by down_factor.
struct BernoulliPriceModel {
    prec_t up_factor = 1.02;
    prec_t down_factor = 0.98;
    prec_t up_prob = 0.5;
    prec_t initial_price = 100.0;
    long horizon = 20;

    std::vector<std::string> invariant_violations() const;
};

/// American put contract: the right to sell at `strike` any time up to the
/// horizon.
struct OptionSpec {
    prec_t strike = 100.0;

    prec_t payoff(prec_t price) const { return std::max(prec_t(0), strike - price); }
};

/// Up-probability estimate with its exact binomial confidence interval.
/// lower == upper == mle describes the nominal (uncertainty-free) model.
struct UncertainUpProbability {
    prec_t mle = 0.5;
    prec_t lower = 0.5;
    prec_t upper = 0.5;
    prec_t alpha = 1.0;
    long trials = 0;

    static UncertainUpProbability exact(prec_t p) { return {p, p, p, 1.0, 0}; }
    UncertainUpProbability nominal() const { return {mle, mle, mle, alpha, trials}; }
    bool is_nominal() const { return lower == upper; }
};

/// Simulate price paths of `horizon` steps. start_jitter > 0 draws each
/// path's start price uniformly from initial_price +- start_jitter.
std::vector<numvec> simulate_price_paths(const BernoulliPriceModel& model, long count,
                                         std::uint64_t seed, prec_t start_jitter = 0.0);

/// Maximum-likelihood up-probability from observed paths, with its
/// Clopper-Pearson interval. Every consecutive ratio must match one of the
/// two factors to within 1e-9; the error names the offending path and step.
UncertainUpProbability fit_model(const std::vector<numvec>& paths, prec_t up_factor,
                                 prec_t down_factor, prec_t alpha);

/// Binary-outcome inner minimization: min over p in [p_lower, p_upper] of
/// p * value_up + (1 - p) * value_down. The minimizer puts p_lower on the
/// larger outcome value.
SigmaResult sigma_binary_continuation(prec_t value_up, prec_t value_down, prec_t p_lower,
                                      prec_t p_upper);

/**
 * The option-stopping problem as a finite robust MDP on the recombining
 * price lattice. Non-terminal states are (time, up-count) nodes for
 * time 0..horizon; one absorbing terminal state closes the model. Action 0
 * continues (zero reward), action 1 exercises (payoff reward, then
 * terminal). Continuing at the horizon expires the option worthless.
 */
struct StoppingLattice {
    RobustMdp mdp;
    BernoulliPriceModel price_model;
    OptionSpec option;
    UncertainUpProbability up_prob;

    long state_index(long time, long ups) const { return time * (time + 1) / 2 + ups; }
    prec_t price(long time, long ups) const;
    long root_state() const { return 0; }
    long num_nodes() const { return mdp.num_states; }
};

StoppingLattice build_stopping_rmdp(const BernoulliPriceModel& price_model,
                                    const UncertainUpProbability& up_prob, const OptionSpec& option,
                                    prec_t discount);

/// Exploration kernel of the policy that never exercises, moving on the
/// lattice with the estimated up-probability.
ExplorationKernel never_stop_kernel(const StoppingLattice& lattice);

struct StoppingAssumptionReport {
    bool holds = false;
    prec_t beta = 0.0;
};

/// Data/exploration ratio check for the never-stop policy. A pass extends
/// to every stopping policy; verify_stopping_propagation checks that
/// extension exhaustively on small lattices.
StoppingAssumptionReport check_stopping_assumption(const StoppingLattice& lattice);

/// Both propagation inequalities for one stopping policy against the
/// never-stop kernel: the state-transition ratio bound and the same bound on
/// the induced state-action chain. Returns the two maxima.
std::pair<prec_t, prec_t> stopping_policy_ratios(const StoppingLattice& lattice,
                                                 const ExplorationKernel& kernel,
                                                 const Policy& policy);

/// Enumerate every deterministic stopping policy (lattices of at most
/// max_states states) and check both ratio bounds at level beta.
bool verify_stopping_propagation(const StoppingLattice& lattice, const ExplorationKernel& kernel,
                                 prec_t beta, long max_states = 24);

/**
 * Gaussian bumps on the normalized (price / price_scale, time / horizon)
 * plane, one per grid center, plus a constant feature. Values lie in (0, 1].
 */
class RbfFeatureMap {
public:
    RbfFeatureMap(Eigen::MatrixXd centers, prec_t width_price, prec_t width_time,
                  prec_t price_scale, long horizon);

    /// grid x grid centers over [price_lo, price_hi] x [0, 1] with widths
    /// equal to the grid spacing.
    static RbfFeatureMap grid(long grid, prec_t price_lo, prec_t price_hi, prec_t price_scale,
                              long horizon);

    long dim() const { return centers_.rows() + 1; }
    Eigen::VectorXd operator()(prec_t price, long time) const;

private:
    Eigen::MatrixXd centers_;  // rows of (price, time) in normalized units
    prec_t width_price_;
    prec_t width_time_;
    prec_t price_scale_;
    long horizon_;
};

/// State feature evaluator over (price, time) decision states.
using PriceTimeFeatures = std::function<Eigen::VectorXd(prec_t price, long time)>;

/**
 * Per-sample data for the specialized stopping update, precomputed once per
 * data set: features of the visited state and of its two children, the
 * children's exercise payoffs, and whether the children sit at the horizon.
 * Only continuation needs estimating, so rows cover times 0..horizon-1.
 */
struct PricingDataset {
    Eigen::MatrixXd phi;       // N x k, visited states
    Eigen::MatrixXd phi_up;    // N x k, up children
    Eigen::MatrixXd phi_down;  // N x k, down children
    Eigen::VectorXd payoff_up;
    Eigen::VectorXd payoff_down;
    Eigen::VectorXd at_horizon;  // 1.0 when the children are at the horizon
    Eigen::MatrixXd gram;        // (1/N) Phi' Phi
    long episodes = 0;
    long dim() const { return phi.cols(); }
    long size() const { return phi.rows(); }
};

PricingDataset build_pricing_dataset(const std::vector<numvec>& paths, const PriceTimeFeatures& features,
                                     long feature_dim, const BernoulliPriceModel& factors,
                                     const OptionSpec& option);

/**
 * One specialized inner update: per sample, each child's value is its payoff
 * when the weights' greedy rule exercises there (always at the horizon,
 * where continuing is worthless) and phi' theta otherwise; the two values
 * combine through the binary worst case and the average is solved against
 * the cached Gram matrix.
 */
Eigen::VectorXd arpi_pricing_update(const PricingDataset& data, const UncertainUpProbability& up_prob,
                                    prec_t discount, const Eigen::VectorXd& greedy_weights,
                                    const Eigen::VectorXd& theta);

struct PricingArpiResult {
    Eigen::VectorXd weights;
    std::vector<ArpiIterationDiag> diagnostics;
    bool converged = false;
};

/// Full ARPI on the pricing data: inner fixed point of arpi_pricing_update
/// (warm-started), outer loop until the exercise decisions on the sampled
/// states repeat.
PricingArpiResult arpi_price(const PricingDataset& data, const UncertainUpProbability& up_prob,
                             prec_t discount, prec_t inner_tol = 1e-6, long inner_max_iters = 1000,
                             long outer_max_iters = 30);

/// Exercise rule induced by continuation weights: before the horizon,
/// exercise when the payoff beats the approximated continuation value; at
/// the horizon, whenever the payoff is positive.
struct ExercisePolicy {
    Eigen::VectorXd weights;
    PriceTimeFeatures features;
    OptionSpec option;
    long horizon = 0;

    bool exercise(prec_t price, long time) const;
};

/// Discounted payoff realized by walking the policy down one price path.
prec_t realized_payoff(const ExercisePolicy& policy, const numvec& path, prec_t discount);

}  // namespace radp
