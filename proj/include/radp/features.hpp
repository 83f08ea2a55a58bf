// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <Eigen/Dense>
#include <functional>

#include "radp/types.hpp"

namespace radp {

/// Feature map over states. Materializes to the matrix with phi(x) in row x.
class FeatureMap {
public:
    FeatureMap(long dimension, std::function<Eigen::VectorXd(long state)> eval)
        : dim_(dimension), eval_(std::move(eval)) {}

    long dim() const { return dim_; }
    Eigen::VectorXd operator()(long state) const { return eval_(state); }

    Eigen::MatrixXd materialize(long num_states) const {
        Eigen::MatrixXd phi(num_states, dim_);
        for (long x = 0; x < num_states; x++) phi.row(x) = eval_(x).transpose();
        return phi;
    }

    /// Indicator features: one coordinate per state.
    static FeatureMap tabular(long num_states) {
        return FeatureMap(num_states, [num_states](long x) {
            Eigen::VectorXd e = Eigen::VectorXd::Zero(num_states);
            e(x) = 1.0;
            return e;
        });
    }

private:
    long dim_;
    std::function<Eigen::VectorXd(long)> eval_;
};

/// Feature map over state-action pairs.
class StateActionFeatureMap {
public:
    StateActionFeatureMap(long dimension, std::function<Eigen::VectorXd(long state, long action)> eval)
        : dim_(dimension), eval_(std::move(eval)) {}

    long dim() const { return dim_; }
    Eigen::VectorXd operator()(long state, long action) const { return eval_(state, action); }

    /// Rows phi(x, policy[x]) for every state (the greedy feature matrix).
    Eigen::MatrixXd materialize(const Policy& policy) const {
        const long n = static_cast<long>(policy.size());
        Eigen::MatrixXd phi(n, dim_);
        for (long x = 0; x < n; x++) phi.row(x) = eval_(x, policy[x]).transpose();
        return phi;
    }

    /// Indicator features: one coordinate per (state, action) pair.
    static StateActionFeatureMap tabular(long num_states, long num_actions) {
        const long dim = num_states * num_actions;
        return StateActionFeatureMap(dim, [dim, num_actions](long x, long u) {
            Eigen::VectorXd e = Eigen::VectorXd::Zero(dim);
            e(x * num_actions + u) = 1.0;
            return e;
        });
    }

private:
    long dim_;
    std::function<Eigen::VectorXd(long, long)> eval_;
};

}  // namespace radp
