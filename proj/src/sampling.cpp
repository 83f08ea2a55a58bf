// Apache License, Version 2.0, refer to LICENSE.txt
#include "radp/sampling.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "radp/errors.hpp"
#include "radp/rng.hpp"
#include "radp/sigma.hpp"

namespace radp {

Trajectory generate_trajectory(const RobustMdp& model, const ExplorationKernel& kernel,
                               const Policy& policy, const numvec& start_distribution,
                               std::uint64_t seed, long num_steps) {
    if (kernel.num_states() != model.num_states || kernel.num_terminals() != model.num_terminals)
        throw std::invalid_argument("kernel dimensions do not match the model");
    if (static_cast<long>(start_distribution.size()) != model.num_states)
        throw std::invalid_argument("start distribution has wrong dimension");

    Rng rng(seed);
    Trajectory traj;
    traj.steps.reserve(num_steps);
    traj.episodes = 0;

    const long n = model.num_states;
    numvec row(model.outcome_dim());
    long state = -1;
    long t = 0;
    for (long produced = 0; produced < num_steps; produced++) {
        if (state < 0) {
            state = rng.categorical(start_distribution);
            traj.episodes++;
            t = 0;
        }
        for (long j = 0; j < model.outcome_dim(); j++) row[j] = kernel.transitions(state, j);
        const long next = rng.categorical(row);

        Step step;
        step.time = t++;
        step.state = state;
        step.action = policy[state];
        step.reward = model.reward[state][step.action];
        step.next = next;
        step.terminal = next >= n;
        traj.steps.push_back(step);

        state = step.terminal ? -1 : next;
    }
    if (traj.episodes == 0) traj.episodes = 1;
    return traj;
}

Trajectory exhaustive_pairs(const RobustMdp& model, std::uint64_t seed) {
    Rng rng(seed);
    const std::vector<std::vector<numvec>> nominal = nominal_of(model, NominalSelector::defaults());

    Trajectory traj;
    traj.steps.reserve(model.num_states * model.num_actions);
    traj.episodes = 1;
    long t = 0;
    for (long x = 0; x < model.num_states; x++) {
        for (long u = 0; u < model.num_actions; u++) {
            Step step;
            step.time = t++;
            step.state = x;
            step.action = u;
            step.reward = model.reward[x][u];
            step.next = rng.categorical(nominal[x][u]);
            step.terminal = step.next >= model.num_states;
            traj.steps.push_back(step);
        }
    }
    return traj;
}

void save_trajectory(std::ostream& out, const Trajectory& trajectory) {
    out << "# episodes " << trajectory.episodes << "\n";
    char buffer[128];
    for (const Step& s : trajectory.steps) {
        std::snprintf(buffer, sizeof(buffer), "%ld %ld %ld %.17g %ld %d\n", s.time, s.state,
                      s.action, s.reward, s.next, s.terminal ? 1 : 0);
        out << buffer;
    }
}

Trajectory load_trajectory(std::istream& in) {
    Trajectory traj;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream header(line.substr(1));
            std::string tag;
            header >> tag;
            if (tag == "episodes") header >> traj.episodes;
            continue;
        }
        std::istringstream fields(line);
        Step s;
        int terminal = 0;
        if (!(fields >> s.time >> s.state >> s.action >> s.reward >> s.next >> terminal))
            throw ValidationError("malformed trajectory record: " + line);
        s.terminal = terminal != 0;
        traj.steps.push_back(s);
    }
    return traj;
}

SampledMatrices::SampledMatrices(const Trajectory& trajectory, const FeatureMap& features,
                                 const RobustMdp& model)
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
        const Eigen::VectorXd phi = features(s.state);
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

    value_features_ = features.materialize(model.num_states);

    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(gram_);
    const prec_t smin = svd.singularValues().minCoeff();
    condition_ = smin > 0.0 ? svd.singularValues().maxCoeff() / smin
                            : std::numeric_limits<prec_t>::infinity();
}

Eigen::VectorXd SampledMatrices::sigma_term(const Eigen::VectorXd& w) const {
    const Eigen::VectorXd values = value_features_ * w;
    numvec padded(model_->outcome_dim(), 0.0);
    for (long x = 0; x < model_->num_states; x++) padded[x] = values(x);

    Eigen::VectorXd out = Eigen::VectorXd::Zero(dim());
    for (std::size_t h = 0; h < handles_.size(); h++) {
        const auto [x, u] = handles_[h];
        const prec_t sig = sigma_set(padded, model_->uncertainty[x][u]).value;
        out += handle_features_.row(h).transpose() * sig;
    }
    return out / weight_;
}

SampledMatrices estimate_matrices(const Trajectory& trajectory, const FeatureMap& features,
                                  const RobustMdp& model) {
    return SampledMatrices(trajectory, features, model);
}

Eigen::VectorXd rpvi_sampled(const SampledMatrices& matrices, prec_t tol, long max_iters) {
    if (matrices.rank_deficient())
        throw ValidationError("sampled feature Gram matrix is rank deficient; "
                              "widen the data or shrink the features");
    const Eigen::LDLT<Eigen::MatrixXd> solver(matrices.gram());

    Eigen::VectorXd w = Eigen::VectorXd::Zero(matrices.dim());
    prec_t step = std::numeric_limits<prec_t>::infinity();
    for (long iter = 0; iter < max_iters; iter++) {
        const Eigen::VectorXd next =
            solver.solve(matrices.reward() + matrices.discount() * matrices.sigma_term(w));
        step = (next - w).lpNorm<Eigen::Infinity>();
        w = next;
        if (w.lpNorm<Eigen::Infinity>() > DIVERGENCE_NORM)
            throw DivergenceError("rpvi_sampled iterates diverged", w.lpNorm<Eigen::Infinity>(),
                                  iter + 1);
        if (step <= tol) return w;
    }
    throw NonConvergenceError("rpvi_sampled did not reach tolerance", step, max_iters);
}

}  // namespace radp
