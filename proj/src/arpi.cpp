// Apache License, Version 2.0, refer to LICENSE.txt
#include "radp/arpi.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <stdexcept>

#include "radp/errors.hpp"
#include "radp/sigma.hpp"

namespace radp {

SaSampledMatrices::SaSampledMatrices(const Trajectory& trajectory,
                                     const StateActionFeatureMap& features, const RobustMdp& model)
    : model_(&model), discount_(model.discount) {
    if (trajectory.steps.empty()) throw std::invalid_argument("empty trajectory");

    const long k = features.dim();
    weight_ = model.num_terminals == 0 ? static_cast<prec_t>(trajectory.steps.size())
                                       : static_cast<prec_t>(trajectory.episodes);

    gram_ = Eigen::MatrixXd::Zero(k, k);
    reward_ = Eigen::VectorXd::Zero(k);

    std::map<std::pair<long, long>, long> handle_index;
    std::vector<Eigen::VectorXd> sums;
    for (const Step& s : trajectory.steps) {
        const Eigen::VectorXd phi = features(s.state, s.action);
        gram_.noalias() += phi * phi.transpose();
        reward_ += phi * s.reward;

        const auto key = std::make_pair(s.state, s.action);
        const auto found = handle_index.find(key);
        if (found == handle_index.end()) {
            handle_index.emplace(key, static_cast<long>(sums.size()));
            sums.push_back(phi);
        } else {
            sums[found->second] += phi;
        }
    }
    gram_ /= weight_;
    reward_ /= weight_;

    handles_.resize(sums.size());
    handle_features_.resize(static_cast<long>(sums.size()), k);
    for (const auto& [key, index] : handle_index) {
        handles_[index] = key;
        handle_features_.row(index) = sums[index].transpose();
    }

    for (const auto& [x, u] : handles_) sampled_states_.push_back(x);
    std::sort(sampled_states_.begin(), sampled_states_.end());
    sampled_states_.erase(std::unique(sampled_states_.begin(), sampled_states_.end()),
                          sampled_states_.end());

    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(gram_);
    const prec_t smin = svd.singularValues().minCoeff();
    condition_ = smin > 0.0 ? svd.singularValues().maxCoeff() / smin
                            : std::numeric_limits<prec_t>::infinity();
}

Eigen::VectorXd SaSampledMatrices::sigma_term(const numvec& state_values) const {
    const numvec padded = padded_outcome_values(*model_, state_values);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(dim());
    for (std::size_t h = 0; h < handles_.size(); h++) {
        const auto [x, u] = handles_[h];
        out += handle_features_.row(h).transpose() * sigma_set(padded, model_->uncertainty[x][u]).value;
    }
    return out / weight_;
}

SaSampledMatrices estimate_sa_matrices(const Trajectory& trajectory,
                                       const StateActionFeatureMap& features,
                                       const RobustMdp& model) {
    return SaSampledMatrices(trajectory, features, model);
}

Policy greedy_policy(const Eigen::VectorXd& w, const StateActionFeatureMap& features,
                     long num_states, long num_actions) {
    Policy policy(num_states, 0);
    for (long x = 0; x < num_states; x++) {
        prec_t best = -std::numeric_limits<prec_t>::infinity();
        for (long u = 0; u < num_actions; u++) {
            const prec_t q = features(x, u).dot(w);
            if (q > best) {
                best = q;
                policy[x] = u;
            }
        }
    }
    return policy;
}

Eigen::VectorXd arpi_inner(const SaSampledMatrices& matrices, const StateActionFeatureMap& features,
                           const Policy& target, const Eigen::VectorXd& theta0, prec_t tol,
                           long max_iters, long* iterations) {
    if (matrices.rank_deficient())
        throw ValidationError("state-action Gram matrix is rank deficient; the data do not "
                              "cover the feature space");
    const Eigen::LDLT<Eigen::MatrixXd> solver(matrices.gram());
    const Eigen::MatrixXd greedy_features = features.materialize(target);

    Eigen::VectorXd theta = theta0;
    prec_t step = std::numeric_limits<prec_t>::infinity();
    for (long iter = 0; iter < max_iters; iter++) {
        const Eigen::VectorXd greedy_values = greedy_features * theta;
        const numvec values(greedy_values.data(), greedy_values.data() + greedy_values.size());
        const Eigen::VectorXd next =
            solver.solve(matrices.reward() + matrices.discount() * matrices.sigma_term(values));

        step = (next - theta).lpNorm<Eigen::Infinity>();
        theta = next;
        if (theta.lpNorm<Eigen::Infinity>() > DIVERGENCE_NORM)
            throw DivergenceError("arpi inner iteration diverged", theta.lpNorm<Eigen::Infinity>(),
                                  iter + 1);
        if (step <= tol) {
            if (iterations) *iterations = iter + 1;
            return theta;
        }
    }
    throw NonConvergenceError("arpi inner iteration did not reach tolerance", step, max_iters);
}

ArpiResult arpi(const Trajectory& trajectory, const StateActionFeatureMap& features,
                const RobustMdp& model, prec_t inner_tol, long inner_max_iters,
                long outer_max_iters) {
    // The sample averages are computed once here and shared by every outer
    // iteration; only the greedy target changes.
    const SaSampledMatrices matrices = estimate_sa_matrices(trajectory, features, model);

    ArpiResult result;
    result.weights = Eigen::VectorXd::Zero(matrices.dim());
    result.policy = greedy_policy(result.weights, features, model.num_states, model.num_actions);

    for (long outer = 0; outer < outer_max_iters; outer++) {
        const Policy target = greedy_policy(result.weights, features, model.num_states,
                                            model.num_actions);
        long inner_iterations = 0;
        Eigen::VectorXd next;
        try {
            next = arpi_inner(matrices, features, target, result.weights, inner_tol,
                              inner_max_iters, &inner_iterations);
        } catch (const DivergenceError& err) {
            throw DivergenceError("arpi outer iteration " + std::to_string(outer) +
                                  ": " + err.what(), err.norm(), err.iterations());
        }

        const Policy next_policy =
            greedy_policy(next, features, model.num_states, model.num_actions);
        long changes = 0;
        for (long x : matrices.sampled_states())
            if (next_policy[x] != result.policy[x]) changes++;

        ArpiIterationDiag diag;
        diag.outer = outer;
        diag.inner_iterations = inner_iterations;
        diag.inner_residual = (next - result.weights).lpNorm<Eigen::Infinity>();
        diag.policy_changes = changes;
        result.diagnostics.push_back(diag);

        result.weights = next;
        result.policy = next_policy;
        if (changes == 0) {
            result.converged = true;
            break;
        }
    }
    return result;
}

}  // namespace radp
