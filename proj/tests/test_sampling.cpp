// Apache License, Version 2.0, refer to LICENSE.txt
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "radp/linear_fa.hpp"
#include "radp/rng.hpp"
#include "radp/sampling.hpp"
#include "support/oracles.hpp"

using namespace radp;

namespace {

ExplorationKernel kernel_from(std::initializer_list<std::initializer_list<prec_t>> rows) {
    ExplorationKernel k;
    const long n = static_cast<long>(rows.size());
    const long m = static_cast<long>(rows.begin()->size());
    k.transitions.resize(n, m);
    long x = 0;
    for (const auto& row : rows) {
        long j = 0;
        for (prec_t p : row) k.transitions(x, j++) = p;
        x++;
    }
    return k;
}

RobustMdp two_state_model() {
    RobustMdp m = make_mdp(2, 0, 1, 0.9);
    m.reward[0][0] = 1.0;
    m.reward[1][0] = -1.0;
    m.uncertainty[0].push_back(UncertaintySet::singleton({0.5, 0.5}));
    m.uncertainty[1].push_back(UncertaintySet::singleton({0.5, 0.5}));
    return m;
}

}  // namespace

TEST_CASE("deterministic kernel yields the unique path") {
    RobustMdp m = make_mdp(2, 1, 1, 0.9);
    m.uncertainty[0].push_back(UncertaintySet::singleton({0.0, 1.0, 0.0}));
    m.uncertainty[1].push_back(UncertaintySet::singleton({0.0, 0.0, 1.0}));
    const ExplorationKernel k = kernel_from({{0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}});

    const Trajectory traj = generate_trajectory(m, k, {0, 0}, {1.0, 0.0}, 42, 6);
    REQUIRE(traj.steps.size() == 6);
    CHECK(traj.episodes == 3);  // x0 -> x1 -> terminal, repeated
    for (std::size_t i = 0; i < traj.steps.size(); i += 2) {
        CHECK(traj.steps[i].state == 0);
        CHECK(traj.steps[i].next == 1);
        CHECK(traj.steps[i + 1].state == 1);
        CHECK(traj.steps[i + 1].terminal);
        CHECK(traj.steps[i + 1].time == 1);
    }
}

TEST_CASE("identical seeds reproduce the trajectory exactly") {
    const RobustMdp m = two_state_model();
    const ExplorationKernel k = kernel_from({{0.7, 0.3}, {0.4, 0.6}});
    const Trajectory a = generate_trajectory(m, k, {0, 0}, {0.5, 0.5}, 1234, 500);
    const Trajectory b = generate_trajectory(m, k, {0, 0}, {0.5, 0.5}, 1234, 500);
    const Trajectory c = generate_trajectory(m, k, {0, 0}, {0.5, 0.5}, 1235, 500);

    REQUIRE(a.steps.size() == b.steps.size());
    bool all_equal = true, any_differs = false;
    for (std::size_t i = 0; i < a.steps.size(); i++) {
        all_equal = all_equal && a.steps[i].state == b.steps[i].state &&
                    a.steps[i].next == b.steps[i].next && a.steps[i].reward == b.steps[i].reward;
        any_differs = any_differs || a.steps[i].next != c.steps[i].next;
    }
    CHECK(all_equal);
    CHECK(any_differs);
}

TEST_CASE("empirical transition frequencies approach the kernel") {
    const RobustMdp m = two_state_model();
    const ExplorationKernel k = kernel_from({{0.5, 0.5}, {0.5, 0.5}});
    const Trajectory traj = generate_trajectory(m, k, {0, 0}, {1.0, 0.0}, 99, 100000);

    long from0 = 0, to0 = 0;
    for (const Step& s : traj.steps) {
        if (s.state != 0) continue;
        from0++;
        if (s.next == 0) to0++;
    }
    CHECK(std::abs(static_cast<prec_t>(to0) / from0 - 0.5) < 0.01);
}

TEST_CASE("trajectory dump and load round trip") {
    const RobustMdp m = two_state_model();
    const ExplorationKernel k = kernel_from({{0.7, 0.3}, {0.4, 0.6}});
    const Trajectory traj = generate_trajectory(m, k, {0, 0}, {0.5, 0.5}, 7, 64);

    std::stringstream buffer;
    save_trajectory(buffer, traj);
    const Trajectory loaded = load_trajectory(buffer);

    REQUIRE(loaded.steps.size() == traj.steps.size());
    CHECK(loaded.episodes == traj.episodes);
    for (std::size_t i = 0; i < traj.steps.size(); i++) {
        CHECK(loaded.steps[i].time == traj.steps[i].time);
        CHECK(loaded.steps[i].state == traj.steps[i].state);
        CHECK(loaded.steps[i].action == traj.steps[i].action);
        CHECK(loaded.steps[i].reward == traj.steps[i].reward);
        CHECK(loaded.steps[i].next == traj.steps[i].next);
        CHECK(loaded.steps[i].terminal == traj.steps[i].terminal);
    }
}

TEST_CASE("estimates from tiny hand-built trajectories") {
    RobustMdp m = make_mdp(1, 0, 1, 0.9);
    m.reward[0][0] = 2.0;
    m.uncertainty[0].push_back(UncertaintySet::singleton({1.0}));

    Trajectory single;
    single.steps.push_back({0, 0, 0, 2.0, 0, false});
    const SampledMatrices one = estimate_matrices(single, FeatureMap::tabular(1), m);
    CHECK(one.gram()(0, 0) == doctest::Approx(1.0));
    CHECK(one.reward()(0) == doctest::Approx(2.0));

    RobustMdp m2 = two_state_model();
    Trajectory pair;
    pair.steps.push_back({0, 0, 0, 1.0, 1, false});
    pair.steps.push_back({1, 1, 0, -1.0, 0, false});
    const SampledMatrices half = estimate_matrices(pair, FeatureMap::tabular(2), m2);
    CHECK(half.gram()(0, 0) == doctest::Approx(0.5));
    CHECK(half.gram()(1, 1) == doctest::Approx(0.5));
    CHECK(half.gram()(0, 1) == doctest::Approx(0.0));
}

TEST_CASE("gram estimate is exactly the empirical-visits weighting") {
    // Identity that holds pathwise: (1/N) sum phi phi' = Phi' D_hat Phi with
    // D_hat the empirical visit measure. Enumerate every length-2 path of a
    // 2-state chain and check it, along with the path probabilities.
    const RobustMdp m = two_state_model();
    Eigen::MatrixXd phi(2, 2);
    phi << 1.0, 0.3, -0.5, 2.0;
    const FeatureMap features(2, [&phi](long x) { return Eigen::VectorXd(phi.row(x)); });

    prec_t total_prob = 0.0;
    const prec_t kernel_rows[2][2] = {{0.7, 0.3}, {0.4, 0.6}};
    for (long x0 = 0; x0 < 2; x0++) {
        for (long x1 = 0; x1 < 2; x1++) {
            for (long x2 = 0; x2 < 2; x2++) {
                Trajectory traj;
                traj.steps.push_back({0, x0, 0, m.reward[x0][0], x1, false});
                traj.steps.push_back({1, x1, 0, m.reward[x1][0], x2, false});
                const SampledMatrices est = estimate_matrices(traj, features, m);

                Eigen::Vector2d counts = Eigen::Vector2d::Zero();
                counts(x0) += 0.5;
                counts(x1) += 0.5;
                const Eigen::MatrixXd expected = phi.transpose() * counts.asDiagonal() * phi;
                CHECK((est.gram() - expected).norm() < 1e-14);

                total_prob += 0.5 * kernel_rows[x0][x1] * kernel_rows[x1][x2];
            }
        }
    }
    CHECK(total_prob == doctest::Approx(1.0));  // started uniformly
}

TEST_CASE("tabular gram converges to the stationary weights") {
    const RobustMdp m = two_state_model();
    const ExplorationKernel k = kernel_from({{0.5, 0.5}, {1.0, 0.0}});
    const Trajectory traj = generate_trajectory(m, k, {0, 0}, {0.5, 0.5}, 11, 1000000);
    const SampledMatrices est = estimate_matrices(traj, FeatureMap::tabular(2), m);

    const numvec d = stationary_weights(k);  // (2/3, 1/3)
    CHECK(std::abs(est.gram()(0, 0) - d[0]) < 0.005);
    CHECK(std::abs(est.gram()(1, 1) - d[1]) < 0.005);
}

TEST_CASE("identical seeds give identical estimated matrices") {
    const RobustMdp m = two_state_model();
    const ExplorationKernel k = kernel_from({{0.7, 0.3}, {0.4, 0.6}});
    const Trajectory a = generate_trajectory(m, k, {0, 0}, {0.5, 0.5}, 5, 2000);
    const Trajectory b = generate_trajectory(m, k, {0, 0}, {0.5, 0.5}, 5, 2000);
    const SampledMatrices ea = estimate_matrices(a, FeatureMap::tabular(2), m);
    const SampledMatrices eb = estimate_matrices(b, FeatureMap::tabular(2), m);
    CHECK(ea.gram() == eb.gram());      // bitwise
    CHECK(ea.reward() == eb.reward());  // bitwise
}

TEST_CASE("rpvi_sampled with exact matrices equals rpvi_exact") {
    Rng rng(61);
    const long n = 4;
    const RobustMdp m = testing::random_box_mdp(rng, n, 1, 0.85);
    const Policy pi(n, 0);

    // Build the trajectory so each state appears exactly once: the sample
    // averages then reproduce uniform weights exactly.
    Trajectory traj;
    for (long x = 0; x < n; x++) traj.steps.push_back({x, x, 0, m.reward[x][0], 0, false});

    const SampledMatrices est = estimate_matrices(traj, FeatureMap::tabular(n), m);
    const Eigen::VectorXd w_sampled = rpvi_sampled(est, 1e-12);
    const Eigen::VectorXd w_exact = rpvi_exact(m, pi, Eigen::MatrixXd::Identity(n, n),
                                               numvec(n, 1.0 / n), 1e-12);
    for (long x = 0; x < n; x++)
        CHECK(w_sampled(x) == doctest::Approx(w_exact(x)).epsilon(1e-10));
}

TEST_CASE("singleton sets: sampled rpvi equals the least-squares solve on the same data") {
    Rng rng(67);
    const long n = 5, k = 3;
    const RobustMdp m = testing::random_singleton_mdp(rng, n, 1, 0.9);
    const Policy pi(n, 0);
    ExplorationKernel kernel;
    kernel.transitions.resize(n, n);
    for (long x = 0; x < n; x++)
        for (long j = 0; j < n; j++) kernel.transitions(x, j) = m.uncertainty[x][0].point()[j];

    Eigen::MatrixXd phi(n, k);
    for (long i = 0; i < n; i++)
        for (long j = 0; j < k; j++) phi(i, j) = rng.uniform(-1.0, 1.0);
    const FeatureMap features(k, [&phi](long x) { return Eigen::VectorXd(phi.row(x)); });

    const Trajectory traj = generate_trajectory(m, kernel, pi, numvec(n, 0.2), 31, 20000);
    const SampledMatrices est = estimate_matrices(traj, features, m);
    const Eigen::VectorXd iterated = rpvi_sampled(est, 1e-13);

    // Same samples, direct solve: (A - gamma C) w = b with
    // C = (1/N) sum phi(x_t) (P_{x_t} Phi) using the model's expectation.
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(k, k), C = Eigen::MatrixXd::Zero(k, k);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(k);
    for (const Step& s : traj.steps) {
        const Eigen::VectorXd f = phi.row(s.state).transpose();
        Eigen::VectorXd expected_next = Eigen::VectorXd::Zero(k);
        const numvec& p = m.uncertainty[s.state][0].point();
        for (long j = 0; j < n; j++) expected_next += p[j] * phi.row(j).transpose();
        A += f * f.transpose();
        C += f * expected_next.transpose();
        b += f * s.reward;
    }
    const prec_t N = static_cast<prec_t>(traj.steps.size());
    const Eigen::VectorXd solved =
        ((A - m.discount * C) / N).fullPivLu().solve(b / N);
    for (long j = 0; j < k; j++)
        CHECK(iterated(j) == doctest::Approx(solved(j)).epsilon(1e-8));
}

TEST_CASE("episodic weighting divides by episodes, matching visit weights") {
    // x0 stays w.p. 0.5 else exits: visit weights are (2.0) and the tabular
    // gram estimate should approach 2, not 1.
    RobustMdp m = make_mdp(1, 1, 1, 0.9);
    m.reward[0][0] = 1.0;
    m.uncertainty[0].push_back(UncertaintySet::singleton({0.5, 0.5}));
    const ExplorationKernel k = kernel_from({{0.5, 0.5}});

    const Trajectory traj = generate_trajectory(m, k, {0}, {1.0}, 17, 200000);
    const SampledMatrices est = estimate_matrices(traj, FeatureMap::tabular(1), m);
    const numvec d = visit_weights(k, {1.0});
    CHECK(std::abs(est.gram()(0, 0) - d[0]) < 0.05);
}

TEST_CASE("exhaustive pairs cover every state-action pair once") {
    Rng rng(71);
    const RobustMdp m = testing::random_box_mdp(rng, 3, 2, 0.9);
    const Trajectory traj = exhaustive_pairs(m, 3);
    REQUIRE(traj.steps.size() == 6);
    std::vector<int> seen(6, 0);
    for (const Step& s : traj.steps) {
        seen[s.state * 2 + s.action]++;
        CHECK(s.reward == m.reward[s.state][s.action]);
    }
    for (int c : seen) CHECK(c == 1);
}
