// Apache License, Version 2.0, refer to LICENSE.txt
#include "radp/exact_dp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "radp/errors.hpp"
#include "radp/sigma.hpp"

namespace radp {

namespace {

prec_t sup_norm_diff(const numvec& a, const numvec& b) {
    prec_t best = 0.0;
    for (std::size_t i = 0; i < a.size(); i++) best = std::max(best, std::abs(a[i] - b[i]));
    return best;
}

void check_policy(const RobustMdp& model, const Policy& policy) {
    if (static_cast<long>(policy.size()) != model.num_states)
        throw std::invalid_argument("policy must assign an action to every non-terminal state");
    for (long u : policy)
        if (u < 0 || u >= model.num_actions) throw std::invalid_argument("policy action out of range");
}

}  // namespace

long geometric_iteration_bound(prec_t discount, prec_t tol) {
    if (discount >= 1.0)
        throw std::invalid_argument(
            "iteration budget must be given explicitly for discount >= 1 (proper-policy case)");
    const prec_t steps = std::log(tol * (1.0 - discount)) / std::log(discount);
    return static_cast<long>(std::ceil(steps)) + 100;
}

numvec policy_reward(const RobustMdp& model, const Policy& policy) {
    numvec r(model.num_states);
    for (long x = 0; x < model.num_states; x++) r[x] = model.reward[x][policy[x]];
    return r;
}

numvec sigma_pi(const RobustMdp& model, const Policy& policy, const numvec& padded) {
    numvec out(model.num_states);
    for (long x = 0; x < model.num_states; x++)
        out[x] = sigma_set(padded, model.uncertainty[x][policy[x]]).value;
    return out;
}

numvec apply_T_pi(const RobustMdp& model, const Policy& policy, const numvec& values) {
    check_policy(model, policy);
    const numvec padded = padded_outcome_values(model, values);
    numvec out = sigma_pi(model, policy, padded);
    for (long x = 0; x < model.num_states; x++)
        out[x] = model.reward[x][policy[x]] + model.discount * out[x];
    return out;
}

numvec evaluate_policy_exact(const RobustMdp& model, const Policy& policy, prec_t tol,
                             long max_iters) {
    check_policy(model, policy);
    if (max_iters <= 0) max_iters = geometric_iteration_bound(model.discount, tol);

    numvec v(model.num_states, 0.0);
    prec_t residual = 0.0;
    for (long iter = 0; iter < max_iters; iter++) {
        numvec next = apply_T_pi(model, policy, v);
        residual = sup_norm_diff(next, v);
        v = std::move(next);
        if (residual <= tol) return v;
    }
    throw NonConvergenceError("evaluate_policy_exact did not reach tolerance", residual, max_iters);
}

Policy greedy_policy_exact(const RobustMdp& model, const numvec& values) {
    const numvec padded = padded_outcome_values(model, values);
    Policy policy(model.num_states, 0);
    for (long x = 0; x < model.num_states; x++) {
        prec_t best = -std::numeric_limits<prec_t>::infinity();
        for (long u = 0; u < model.num_actions; u++) {
            const prec_t q =
                model.reward[x][u] + model.discount * sigma_set(padded, model.uncertainty[x][u]).value;
            if (q > best) {
                best = q;
                policy[x] = u;
            }
        }
    }
    return policy;
}

ExactSolution solve_optimal_exact(const RobustMdp& model, prec_t tol, long max_iters) {
    if (max_iters <= 0) max_iters = geometric_iteration_bound(model.discount, tol);

    ExactSolution sol;
    sol.value.assign(model.num_states, 0.0);
    for (long iter = 0; iter < max_iters; iter++) {
        const numvec padded = padded_outcome_values(model, sol.value);
        numvec next(model.num_states);
        for (long x = 0; x < model.num_states; x++) {
            prec_t best = -std::numeric_limits<prec_t>::infinity();
            for (long u = 0; u < model.num_actions; u++) {
                const prec_t q = model.reward[x][u] +
                                 model.discount * sigma_set(padded, model.uncertainty[x][u]).value;
                best = std::max(best, q);
            }
            next[x] = best;
        }
        sol.residual = sup_norm_diff(next, sol.value);
        sol.value = std::move(next);
        sol.iterations = iter + 1;
        if (sol.residual <= tol) {
            sol.policy = greedy_policy_exact(model, sol.value);
            return sol;
        }
    }
    throw NonConvergenceError("solve_optimal_exact did not reach tolerance", sol.residual, max_iters);
}

ExactSolution robust_policy_iteration(const RobustMdp& model, prec_t tol, long max_policy_updates) {
    ExactSolution sol;
    sol.policy.assign(model.num_states, 0);
    for (long round = 0; round < max_policy_updates; round++) {
        sol.value = evaluate_policy_exact(model, sol.policy, tol);
        Policy improved = greedy_policy_exact(model, sol.value);
        sol.iterations = round + 1;
        if (improved == sol.policy) return sol;
        sol.policy = std::move(improved);
    }
    throw NonConvergenceError("robust_policy_iteration cycled without stabilizing", 0.0,
                              max_policy_updates);
}

}  // namespace radp
