// Apache License, Version 2.0, refer to LICENSE.txt
#include "radp/option/pricing.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "radp/errors.hpp"
#include "radp/rng.hpp"

namespace radp {

std::vector<std::string> BernoulliPriceModel::invariant_violations() const {
    std::vector<std::string> out;
    if (!(down_factor > 0.0)) out.push_back("down factor must be positive");
    if (!(down_factor < up_factor)) out.push_back("down factor must be below the up factor");
    if (!(up_prob > 0.0) || !(up_prob < 1.0)) out.push_back("up probability must lie in (0, 1)");
    if (!(initial_price > 0.0)) out.push_back("initial price must be positive");
    if (horizon < 1) out.push_back("horizon must be at least one step");
    return out;
}

std::vector<numvec> simulate_price_paths(const BernoulliPriceModel& model, long count,
                                         std::uint64_t seed, prec_t start_jitter) {
    std::vector<numvec> paths(count);
    for (long i = 0; i < count; i++) {
        Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(i));
        numvec& path = paths[i];
        path.resize(model.horizon + 1);
        path[0] = start_jitter > 0.0
                      ? model.initial_price + rng.uniform(-start_jitter, start_jitter)
                      : model.initial_price;
        for (long t = 0; t < model.horizon; t++)
            path[t + 1] = path[t] * (rng.bernoulli(model.up_prob) ? model.up_factor
                                                                  : model.down_factor);
    }
    return paths;
}

UncertainUpProbability fit_model(const std::vector<numvec>& paths, prec_t up_factor,
                                 prec_t down_factor, prec_t alpha) {
    long ups = 0;
    long moves = 0;
    for (std::size_t i = 0; i < paths.size(); i++) {
        const numvec& path = paths[i];
        for (std::size_t t = 0; t + 1 < path.size(); t++) {
            const prec_t ratio = path[t + 1] / path[t];
            if (std::abs(ratio - up_factor) <= 1e-9)
                ups++;
            else if (std::abs(ratio - down_factor) > 1e-9)
                throw ValidationError("price ratio matches neither factor at path " +
                                      std::to_string(i) + " step " + std::to_string(t));
            moves++;
        }
    }
    if (moves == 0) throw ValidationError("fit_model: no price moves in the data");

    UncertainUpProbability est;
    est.mle = static_cast<prec_t>(ups) / static_cast<prec_t>(moves);
    est.alpha = alpha;
    est.trials = moves;
    const BinomialInterval interval = clopper_pearson(ups, moves, alpha);
    est.lower = interval.lower;
    est.upper = interval.upper;
    return est;
}

SigmaResult sigma_binary_continuation(prec_t value_up, prec_t value_down, prec_t p_lower,
                                      prec_t p_upper) {
    const prec_t p = value_up >= value_down ? p_lower : p_upper;
    SigmaResult res;
    res.value = p * value_up + (1.0 - p) * value_down;
    res.minimizer = {p, 1.0 - p};
    return res;
}

prec_t StoppingLattice::price(long time, long ups) const {
    return price_model.initial_price * std::pow(price_model.up_factor, static_cast<prec_t>(ups)) *
           std::pow(price_model.down_factor, static_cast<prec_t>(time - ups));
}

StoppingLattice build_stopping_rmdp(const BernoulliPriceModel& price_model,
                                    const UncertainUpProbability& up_prob, const OptionSpec& option,
                                    prec_t discount) {
    const long T = price_model.horizon;
    const long num_states = (T + 1) * (T + 2) / 2;  // nodes (t, ups), ups <= t

    StoppingLattice lattice;
    lattice.price_model = price_model;
    lattice.option = option;
    lattice.up_prob = up_prob;
    lattice.mdp = make_mdp(num_states, 1, 2, discount);

    RobustMdp& mdp = lattice.mdp;
    const long terminal = num_states;  // single absorbing outcome
    const long dim = mdp.outcome_dim();

    const auto to_terminal = [&]() {
        numvec p(dim, 0.0);
        p[terminal] = 1.0;
        return UncertaintySet::singleton(std::move(p));
    };

    for (long t = 0; t <= T; t++) {
        for (long ups = 0; ups <= t; ups++) {
            const long x = lattice.state_index(t, ups);
            mdp.reward[x][0] = 0.0;                                  // continue
            mdp.reward[x][1] = option.payoff(lattice.price(t, ups));  // exercise, then terminal

            if (t == T) {
                // Expiry: continuing forfeits the payoff.
                mdp.uncertainty[x].push_back(to_terminal());
            } else {
                const long up_next = lattice.state_index(t + 1, ups + 1);
                const long down_next = lattice.state_index(t + 1, ups);
                if (up_prob.is_nominal()) {
                    numvec p(dim, 0.0);
                    p[up_next] = up_prob.mle;
                    p[down_next] = 1.0 - up_prob.mle;
                    mdp.uncertainty[x].push_back(UncertaintySet::singleton(std::move(p)));
                } else {
                    numvec lo(dim, 0.0), hi(dim, 0.0);
                    lo[up_next] = up_prob.lower;
                    hi[up_next] = up_prob.upper;
                    lo[down_next] = 1.0 - up_prob.upper;
                    hi[down_next] = 1.0 - up_prob.lower;
                    mdp.uncertainty[x].push_back(
                        UncertaintySet::interval_box(std::move(lo), std::move(hi)));
                }
            }
            mdp.uncertainty[x].push_back(to_terminal());
        }
    }
    return lattice;
}

ExplorationKernel never_stop_kernel(const StoppingLattice& lattice) {
    const long n = lattice.mdp.num_states;
    const long T = lattice.price_model.horizon;
    ExplorationKernel kernel;
    kernel.transitions = Eigen::MatrixXd::Zero(n, n + 1);
    for (long t = 0; t <= T; t++) {
        for (long ups = 0; ups <= t; ups++) {
            const long x = lattice.state_index(t, ups);
            if (t == T) {
                kernel.transitions(x, n) = 1.0;
            } else {
                kernel.transitions(x, lattice.state_index(t + 1, ups + 1)) = lattice.up_prob.mle;
                kernel.transitions(x, lattice.state_index(t + 1, ups)) = 1.0 - lattice.up_prob.mle;
            }
        }
    }
    return kernel;
}

StoppingAssumptionReport check_stopping_assumption(const StoppingLattice& lattice) {
    const ExplorationKernel kernel = never_stop_kernel(lattice);
    const Policy never_stop(lattice.mdp.num_states, 0);
    const Assumption2Report report = check_assumption2(lattice.mdp, never_stop, kernel, true);
    return {report.holds, report.beta};
}

std::pair<prec_t, prec_t> stopping_policy_ratios(const StoppingLattice& lattice,
                                                 const ExplorationKernel& kernel,
                                                 const Policy& policy) {
    const RobustMdp& mdp = lattice.mdp;
    const prec_t gamma = mdp.discount;

    const auto ratio = [&](long x, long next) {
        const prec_t sup_mass = mdp.uncertainty[x][policy[x]].max_mass(next);
        if (sup_mass <= 0.0) return prec_t(0);
        const prec_t explored = kernel.transitions(x, next);
        if (explored <= 0.0) return std::numeric_limits<prec_t>::infinity();
        return gamma * sup_mass / explored;
    };

    // State-transition bound over every (x, x') with x' non-terminal.
    prec_t beta_state = 0.0;
    for (long x = 0; x < mdp.num_states; x++)
        for (long next = 0; next < mdp.num_states; next++)
            beta_state = std::max(beta_state, ratio(x, next));

    // The same bound on the induced state-action chain: from pair
    // (x, policy[x]) the reachable pairs are (x', policy[x']), carrying the
    // same transition mass on both sides, so only rows that actually move
    // through the state space (continue rows here) contribute.
    prec_t beta_pair = 0.0;
    for (long x = 0; x < mdp.num_states; x++) {
        if (policy[x] != 0) continue;  // exercising jumps straight to the terminal
        for (long next = 0; next < mdp.num_states; next++)
            beta_pair = std::max(beta_pair, ratio(x, next));
    }
    return {beta_state, beta_pair};
}

bool verify_stopping_propagation(const StoppingLattice& lattice, const ExplorationKernel& kernel,
                                 prec_t beta, long max_states) {
    const long n = lattice.mdp.num_states;
    if (n > max_states)
        throw std::invalid_argument("verify_stopping_propagation: lattice too large to enumerate");

    Policy policy(n, 0);
    const std::uint64_t count = std::uint64_t(1) << n;
    for (std::uint64_t mask = 0; mask < count; mask++) {
        for (long x = 0; x < n; x++) policy[x] = (mask >> x) & 1 ? 1 : 0;
        const auto [beta_state, beta_pair] = stopping_policy_ratios(lattice, kernel, policy);
        if (beta_state > beta + 1e-12 || beta_pair > beta + 1e-12) return false;
    }
    return true;
}

RbfFeatureMap::RbfFeatureMap(Eigen::MatrixXd centers, prec_t width_price, prec_t width_time,
                             prec_t price_scale, long horizon)
    : centers_(std::move(centers)), width_price_(width_price), width_time_(width_time),
      price_scale_(price_scale), horizon_(horizon) {
    if (!(width_price_ > 0.0) || !(width_time_ > 0.0))
        throw std::invalid_argument("RBF widths must be positive");
}

RbfFeatureMap RbfFeatureMap::grid(long grid, prec_t price_lo, prec_t price_hi, prec_t price_scale,
                                  long horizon) {
    if (grid < 2) throw std::invalid_argument("RBF grid needs at least 2 points per axis");
    Eigen::MatrixXd centers(grid * grid, 2);
    const prec_t price_step = (price_hi - price_lo) / static_cast<prec_t>(grid - 1);
    const prec_t time_step = 1.0 / static_cast<prec_t>(grid - 1);
    long row = 0;
    for (long i = 0; i < grid; i++)
        for (long j = 0; j < grid; j++) {
            centers(row, 0) = price_lo + price_step * static_cast<prec_t>(i);
            centers(row, 1) = time_step * static_cast<prec_t>(j);
            row++;
        }
    return RbfFeatureMap(std::move(centers), price_step, time_step, price_scale, horizon);
}

Eigen::VectorXd RbfFeatureMap::operator()(prec_t price, long time) const {
    const prec_t x = price / price_scale_;
    const prec_t t = static_cast<prec_t>(time) / static_cast<prec_t>(horizon_);
    Eigen::VectorXd phi(dim());
    for (long i = 0; i < centers_.rows(); i++) {
        const prec_t dx = (x - centers_(i, 0)) / width_price_;
        const prec_t dt = (t - centers_(i, 1)) / width_time_;
        phi(i) = std::exp(-(dx * dx + dt * dt));
    }
    phi(dim() - 1) = 1.0;
    return phi;
}

PricingDataset build_pricing_dataset(const std::vector<numvec>& paths, const PriceTimeFeatures& features,
                                     long feature_dim, const BernoulliPriceModel& factors,
                                     const OptionSpec& option) {
    const long T = factors.horizon;
    long rows = 0;
    for (const numvec& path : paths) rows += static_cast<long>(path.size()) - 1;
    if (rows <= 0) throw std::invalid_argument("build_pricing_dataset: no samples in the data");

    PricingDataset data;
    data.phi.resize(rows, feature_dim);
    data.phi_up.resize(rows, feature_dim);
    data.phi_down.resize(rows, feature_dim);
    data.payoff_up.resize(rows);
    data.payoff_down.resize(rows);
    data.at_horizon.resize(rows);
    data.episodes = static_cast<long>(paths.size());

    long row = 0;
    for (const numvec& path : paths) {
        for (long t = 0; t + 1 < static_cast<long>(path.size()); t++) {
            const prec_t price = path[t];
            const prec_t up_price = price * factors.up_factor;
            const prec_t down_price = price * factors.down_factor;
            data.phi.row(row) = features(price, t).transpose();
            data.phi_up.row(row) = features(up_price, t + 1).transpose();
            data.phi_down.row(row) = features(down_price, t + 1).transpose();
            data.payoff_up(row) = option.payoff(up_price);
            data.payoff_down(row) = option.payoff(down_price);
            data.at_horizon(row) = t + 1 >= T ? 1.0 : 0.0;
            row++;
        }
    }
    data.gram = data.phi.transpose() * data.phi / static_cast<prec_t>(rows);
    return data;
}

namespace {

/// Child values under the greedy rule of `greedy_q`: payoff where the rule
/// exercises (always at the horizon), continuation estimate otherwise.
Eigen::VectorXd child_values(const Eigen::VectorXd& payoff, const Eigen::VectorXd& greedy_q,
                             const Eigen::VectorXd& continuation, const Eigen::VectorXd& at_horizon) {
    Eigen::VectorXd out(payoff.size());
    for (long i = 0; i < payoff.size(); i++) {
        if (at_horizon(i) > 0.5)
            out(i) = payoff(i);  // exercise whenever the payoff is positive; zero otherwise
        else
            out(i) = payoff(i) > greedy_q(i) ? payoff(i) : continuation(i);
    }
    return out;
}

}  // namespace

Eigen::VectorXd arpi_pricing_update(const PricingDataset& data, const UncertainUpProbability& up_prob,
                                    prec_t discount, const Eigen::VectorXd& greedy_weights,
                                    const Eigen::VectorXd& theta) {
    const Eigen::VectorXd greedy_up = data.phi_up * greedy_weights;
    const Eigen::VectorXd greedy_down = data.phi_down * greedy_weights;
    const Eigen::VectorXd cont_up = data.phi_up * theta;
    const Eigen::VectorXd cont_down = data.phi_down * theta;

    const Eigen::VectorXd nu_up = child_values(data.payoff_up, greedy_up, cont_up, data.at_horizon);
    const Eigen::VectorXd nu_down =
        child_values(data.payoff_down, greedy_down, cont_down, data.at_horizon);

    Eigen::VectorXd sigma(data.size());
    for (long i = 0; i < data.size(); i++)
        sigma(i) =
            sigma_binary_continuation(nu_up(i), nu_down(i), up_prob.lower, up_prob.upper).value;

    const Eigen::VectorXd target =
        data.phi.transpose() * sigma * (discount / static_cast<prec_t>(data.size()));
    return Eigen::LDLT<Eigen::MatrixXd>(data.gram).solve(target);
}

PricingArpiResult arpi_price(const PricingDataset& data, const UncertainUpProbability& up_prob,
                             prec_t discount, prec_t inner_tol, long inner_max_iters,
                             long outer_max_iters) {
    PricingArpiResult result;
    result.weights = Eigen::VectorXd::Zero(data.dim());

    // Exercise decisions at the sampled child states decide outer convergence.
    std::vector<char> last_decisions;
    for (long outer = 0; outer < outer_max_iters; outer++) {
        Eigen::VectorXd theta = result.weights;
        prec_t step = std::numeric_limits<prec_t>::infinity();
        long inner = 0;
        while (inner < inner_max_iters) {
            const Eigen::VectorXd next =
                arpi_pricing_update(data, up_prob, discount, result.weights, theta);
            step = (next - theta).lpNorm<Eigen::Infinity>();
            theta = next;
            inner++;
            if (theta.lpNorm<Eigen::Infinity>() > DIVERGENCE_NORM)
                throw DivergenceError("pricing inner iteration diverged at outer iteration " +
                                          std::to_string(outer),
                                      theta.lpNorm<Eigen::Infinity>(), inner);
            if (step <= inner_tol) break;
        }
        if (step > inner_tol)
            throw NonConvergenceError("pricing inner iteration did not reach tolerance at outer "
                                      "iteration " +
                                          std::to_string(outer),
                                      step, inner_max_iters);

        // Greedy exercise decisions of the new weights on the sampled states.
        const Eigen::VectorXd cont_up = data.phi_up * theta;
        const Eigen::VectorXd cont_down = data.phi_down * theta;
        std::vector<char> decide(2 * data.size());
        for (long i = 0; i < data.size(); i++) {
            decide[2 * i] = data.at_horizon(i) > 0.5 || data.payoff_up(i) > cont_up(i);
            decide[2 * i + 1] = data.at_horizon(i) > 0.5 || data.payoff_down(i) > cont_down(i);
        }

        ArpiIterationDiag diag;
        diag.outer = outer;
        diag.inner_iterations = inner;
        diag.inner_residual = step;
        diag.policy_changes = 0;
        if (!last_decisions.empty())
            for (std::size_t i = 0; i < decide.size(); i++)
                if (decide[i] != last_decisions[i]) diag.policy_changes++;
        result.diagnostics.push_back(diag);

        const bool stable = !last_decisions.empty() && diag.policy_changes == 0;
        result.weights = theta;
        last_decisions = std::move(decide);
        if (stable) {
            result.converged = true;
            break;
        }
    }
    return result;
}

bool ExercisePolicy::exercise(prec_t price, long time) const {
    const prec_t payoff = option.payoff(price);
    if (time >= horizon) return payoff > 0.0;
    return payoff > features(price, time).dot(weights);
}

prec_t realized_payoff(const ExercisePolicy& policy, const numvec& path, prec_t discount) {
    for (long t = 0; t < static_cast<long>(path.size()); t++) {
        if (policy.exercise(path[t], t))
            return std::pow(discount, static_cast<prec_t>(t)) * policy.option.payoff(path[t]);
    }
    return 0.0;
}

}  // namespace radp
