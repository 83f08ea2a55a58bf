// Apache License, Version 2.0, refer to LICENSE.txt
#include "radp/linear_fa.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "radp/errors.hpp"
#include "radp/exact_dp.hpp"
#include "radp/rng.hpp"

namespace radp {

namespace {

Eigen::VectorXd to_eigen(const numvec& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<long>(v.size()));
}

numvec to_numvec(const Eigen::VectorXd& v) { return numvec(v.data(), v.data() + v.size()); }

void check_weights(const numvec& weights, long n) {
    if (static_cast<long>(weights.size()) != n)
        throw std::invalid_argument("projection weights have wrong dimension");
    for (prec_t d : weights)
        if (!(d > 0.0)) throw std::invalid_argument("projection weights must be strictly positive");
}

/// Gram matrix factorization with a condition estimate on the way in.
class GramSolver {
public:
    GramSolver(const Eigen::MatrixXd& phi, const numvec& weights) {
        check_weights(weights, phi.rows());
        const Eigen::VectorXd d = to_eigen(weights);
        phi_d_ = phi.transpose() * d.asDiagonal();  // k x n, reused for right-hand sides
        const Eigen::MatrixXd gram = phi_d_ * phi;
        const Eigen::JacobiSVD<Eigen::MatrixXd> svd(gram);
        const prec_t smin = svd.singularValues().minCoeff();
        const prec_t smax = svd.singularValues().maxCoeff();
        if (!(smin > 0.0) || smax / smin > CONDITION_LIMIT)
            throw ValidationError("feature Gram matrix is rank deficient (condition estimate above " +
                                  std::to_string(CONDITION_LIMIT) + ")");
        solver_.compute(gram);
    }

    /// Solve (Phi' D Phi) w = Phi' D rhs.
    Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const { return solver_.solve(phi_d_ * rhs); }

private:
    Eigen::MatrixXd phi_d_;
    Eigen::LDLT<Eigen::MatrixXd> solver_;
};

}  // namespace

std::vector<std::string> ExplorationKernel::invariant_violations() const {
    std::vector<std::string> out;
    if (transitions.cols() < transitions.rows()) {
        out.push_back("kernel has fewer columns than rows");
        return out;
    }
    for (long x = 0; x < transitions.rows(); x++) {
        prec_t total = 0.0;
        for (long j = 0; j < transitions.cols(); j++) {
            const prec_t p = transitions(x, j);
            if (p < -DISTRIBUTION_TOL || !std::isfinite(p)) {
                out.push_back("kernel row " + std::to_string(x) + " has an invalid entry");
                break;
            }
            total += p;
        }
        if (std::abs(total - 1.0) > MEMBERSHIP_TOL)
            out.push_back("kernel row " + std::to_string(x) + " does not sum to 1");
    }
    return out;
}

numvec stationary_weights(const ExplorationKernel& kernel, prec_t tol, long max_iters) {
    if (kernel.num_terminals() != 0)
        throw std::invalid_argument("stationary_weights requires a kernel without terminal states");
    const long n = kernel.num_states();
    // Asymmetric start: a symmetric one can sit exactly on the fixed point of
    // a periodic chain and mask the missing limit.
    Eigen::VectorXd d(n);
    for (long j = 0; j < n; j++) d(j) = static_cast<prec_t>(j + 1);
    d /= d.sum();

    prec_t step = std::numeric_limits<prec_t>::infinity();
    for (long iter = 0; iter < max_iters; iter++) {
        Eigen::VectorXd next = kernel.transitions.transpose() * d;
        next /= next.sum();
        step = (next - d).lpNorm<Eigen::Infinity>();
        d = next;
        if (step <= tol) {
            for (long j = 0; j < n; j++)
                if (!(d(j) > 10.0 * tol))
                    throw ValidationError("kernel is reducible: stationary weight of state " +
                                          std::to_string(j) + " is zero");
            return to_numvec(d);
        }
    }
    throw NonConvergenceError("stationary_weights power iteration did not converge "
                              "(kernel reducible or periodic)",
                              step, max_iters);
}

numvec visit_weights(const ExplorationKernel& kernel, const numvec& start_distribution) {
    if (kernel.num_terminals() == 0)
        throw std::invalid_argument("visit_weights requires terminal states; "
                                    "use stationary_weights otherwise");
    const long n = kernel.num_states();
    if (static_cast<long>(start_distribution.size()) != n)
        throw std::invalid_argument("start distribution has wrong dimension");

    const Eigen::MatrixXd inner = kernel.transitions.leftCols(n);
    const Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n, n) - inner.transpose();
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(system);
    if (!lu.isInvertible())
        throw ValidationError("kernel is improper: I - P_X is singular");

    const Eigen::VectorXd d = lu.solve(to_eigen(start_distribution));
    for (long j = 0; j < n; j++)
        if (!(d(j) > 1e-14))
            throw ValidationError("state " + std::to_string(j) +
                                  " is never visited under the exploration kernel");
    return to_numvec(d);
}

Assumption2Report check_assumption2(const RobustMdp& model, const Policy& policy,
                                    const ExplorationKernel& kernel, bool policy_aware) {
    if (kernel.num_states() != model.num_states ||
        kernel.num_terminals() != model.num_terminals)
        throw std::invalid_argument("kernel dimensions do not match the model");

    Assumption2Report report;
    report.beta = 0.0;
    for (long x = 0; x < model.num_states; x++) {
        const long u_lo = policy_aware ? policy[x] : 0;
        const long u_hi = policy_aware ? policy[x] + 1 : model.num_actions;
        for (long u = u_lo; u < u_hi; u++) {
            const UncertaintySet& set = model.uncertainty[x][u];
            for (long next = 0; next < model.num_states; next++) {  // terminals exempt
                const prec_t sup_mass = set.max_mass(next);
                const prec_t explored = kernel.transitions(x, next);
                prec_t ratio;
                if (sup_mass <= 0.0)
                    ratio = 0.0;
                else if (explored <= 0.0)
                    ratio = std::numeric_limits<prec_t>::infinity();
                else
                    ratio = model.discount * sup_mass / explored;
                if (ratio > report.beta) {
                    report.beta = ratio;
                    report.witness_state = x;
                    report.witness_next = next;
                }
            }
        }
    }
    report.holds = report.beta < 1.0;
    return report;
}

prec_t weighted_norm(const numvec& values, const numvec& weights) {
    prec_t total = 0.0;
    for (std::size_t i = 0; i < values.size(); i++) total += weights[i] * values[i] * values[i];
    return std::sqrt(total);
}

Eigen::VectorXd fit_projection(const numvec& values, const Eigen::MatrixXd& phi,
                               const numvec& weights) {
    const GramSolver solver(phi, weights);
    return solver.solve(to_eigen(values));
}

numvec project(const numvec& values, const Eigen::MatrixXd& phi, const numvec& weights) {
    return to_numvec(phi * fit_projection(values, phi, weights));
}

Eigen::VectorXd rpvi_exact(const RobustMdp& model, const Policy& policy, const Eigen::MatrixXd& phi,
                           const numvec& weights, prec_t tol, long max_iters) {
    if (phi.rows() != model.num_states)
        throw std::invalid_argument("feature matrix must have one row per non-terminal state");
    const GramSolver solver(phi, weights);
    const Eigen::VectorXd reward = to_eigen(policy_reward(model, policy));

    Eigen::VectorXd w = Eigen::VectorXd::Zero(phi.cols());
    prec_t step = std::numeric_limits<prec_t>::infinity();
    for (long iter = 0; iter < max_iters; iter++) {
        const numvec padded = padded_outcome_values(model, to_numvec(phi * w));
        const Eigen::VectorXd sig = to_eigen(sigma_pi(model, policy, padded));
        const Eigen::VectorXd next = solver.solve(reward + model.discount * sig);

        step = (next - w).lpNorm<Eigen::Infinity>();
        w = next;
        if (w.lpNorm<Eigen::Infinity>() > DIVERGENCE_NORM)
            throw DivergenceError("rpvi_exact iterates diverged", w.lpNorm<Eigen::Infinity>(),
                                  iter + 1);
        if (step <= tol) return w;
    }
    throw NonConvergenceError("rpvi_exact did not reach tolerance", step, max_iters);
}

prec_t contraction_probe(const RobustMdp& model, const Policy& policy, const Eigen::MatrixXd& phi,
                         const numvec& weights, long trials, std::uint64_t seed) {
    const GramSolver solver(phi, weights);
    Rng rng(seed);
    const long n = model.num_states;

    const auto projected_bellman = [&](const numvec& v) {
        const numvec tv = apply_T_pi(model, policy, v);
        return numvec(to_numvec(phi * solver.solve(to_eigen(tv))));
    };

    prec_t worst = 0.0;
    for (long trial = 0; trial < trials; trial++) {
        numvec y(n), z(n), diff(n);
        for (long i = 0; i < n; i++) {
            y[i] = rng.uniform(-1.0, 1.0);
            z[i] = rng.uniform(-1.0, 1.0);
            diff[i] = y[i] - z[i];
        }
        const prec_t denom = weighted_norm(diff, weights);
        if (denom < 1e-12) continue;

        const numvec py = projected_bellman(y);
        const numvec pz = projected_bellman(z);
        numvec pdiff(n);
        for (long i = 0; i < n; i++) pdiff[i] = py[i] - pz[i];
        worst = std::max(worst, weighted_norm(pdiff, weights) / denom);
    }
    return worst;
}

}  // namespace radp
