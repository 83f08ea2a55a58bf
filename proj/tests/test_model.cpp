// Apache License, Version 2.0, refer to LICENSE.txt
#include <doctest.h>

#include <sstream>

#include "radp/errors.hpp"
#include "radp/model.hpp"
#include "radp/model_io.hpp"
#include "radp/rng.hpp"
#include "support/oracles.hpp"

using namespace radp;

namespace {

RobustMdp two_state_singleton() {
    RobustMdp m = make_mdp(2, 0, 1, 0.9);
    m.uncertainty[0].push_back(UncertaintySet::singleton({0.5, 0.5}));
    m.uncertainty[1].push_back(UncertaintySet::singleton({0.5, 0.5}));
    return m;
}

}  // namespace

TEST_CASE("valid singleton model passes validation") {
    const RobustMdp m = two_state_singleton();
    CHECK(validate(m).empty());
}

TEST_CASE("infeasible interval box is reported with its rule") {
    RobustMdp m = make_mdp(2, 0, 1, 0.9);
    m.uncertainty[0].push_back(UncertaintySet::interval_box({0.6, 0.6}, {0.7, 0.7}));
    m.uncertainty[1].push_back(UncertaintySet::singleton({0.5, 0.5}));

    const auto violations = validate(m);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].state == 0);
    CHECK(violations[0].action == 0);
    CHECK(violations[0].rule == "sum(lo) > 1");
}

TEST_CASE("nonzero terminal reward is a violation") {
    RobustMdp m = make_mdp(1, 1, 1, 0.9);
    m.uncertainty[0].push_back(UncertaintySet::singleton({0.0, 1.0}));
    m.terminal_reward[0] = 1.0;

    const auto violations = validate(m);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].rule.find("terminal reward nonzero") != std::string::npos);
}

TEST_CASE("validation catches bad distributions and discount") {
    RobustMdp m = make_mdp(1, 0, 1, 1.0);  // discount 1 without terminals
    m.uncertainty[0].push_back(UncertaintySet::singleton({0.4, 0.4}));  // wrong dim and mass
    CHECK(validate(m).size() >= 2);
}

TEST_CASE("nominal selector: singleton passes through") {
    const RobustMdp m = two_state_singleton();
    const auto table = nominal_of(m, NominalSelector::defaults());
    CHECK(table[0][0] == numvec{0.5, 0.5});
}

TEST_CASE("nominal selector: box midpoint is a member of the box") {
    RobustMdp m = make_mdp(3, 0, 1, 0.9);
    for (long x = 0; x < 3; x++)
        m.uncertainty[x].push_back(UncertaintySet::interval_box({0.0, 0.1, 0.2}, {0.9, 0.5, 0.6}));

    const auto table = nominal_of(m, NominalSelector::defaults());
    for (long x = 0; x < 3; x++) CHECK(m.uncertainty[x][0].contains(table[x][0], 1e-12));
}

TEST_CASE("nominal selector: vertex list takes the first vertex") {
    RobustMdp m = make_mdp(2, 0, 1, 0.9);
    const numvec p1{0.7, 0.3}, p2{0.2, 0.8};
    m.uncertainty[0].push_back(UncertaintySet::vertex_list({p1, p2}));
    m.uncertainty[1].push_back(UncertaintySet::singleton({0.5, 0.5}));

    const auto table = nominal_of(m, NominalSelector::defaults());
    CHECK(table[0][0] == p1);
}

TEST_CASE("nominal selector: missing handler names the variant") {
    RobustMdp m = make_mdp(2, 0, 1, 0.9);
    m.uncertainty[0].push_back(UncertaintySet::vertex_list({{0.7, 0.3}}));
    m.uncertainty[1].push_back(UncertaintySet::singleton({0.5, 0.5}));

    NominalSelector selector = NominalSelector::defaults();
    selector.for_vertices = nullptr;
    CHECK_THROWS_WITH_AS(nominal_of(m, selector),
                         "nominal_of: selector undefined for variant vertex_list", ValidationError);
}

TEST_CASE("nominal members of random models satisfy membership") {
    Rng rng(91);
    for (int trial = 0; trial < 25; trial++) {
        const long n = 2 + rng.uniform_index(4);
        RobustMdp m = testing::random_box_mdp(rng, n, 2, 0.9);
        const auto table = nominal_of(m, NominalSelector::defaults());
        for (long x = 0; x < n; x++)
            for (long u = 0; u < 2; u++) CHECK(m.uncertainty[x][u].contains(table[x][u], 1e-9));
    }
}

TEST_CASE("model json round trip: load validates and fills tables") {
    const char* text = R"({
        "states": ["a", "b"],
        "terminals": ["done"],
        "actions": 2,
        "discount": 0.95,
        "rewards": [[1.0, 0.0], [0.5, -0.5]],
        "uncertainty": [
            [{"type": "singleton", "p": [0.0, 0.5, 0.5]},
             {"type": "interval", "lo": [0.1, 0.0, 0.0], "hi": [1.0, 0.9, 0.2]}],
            [{"type": "vertices", "points": [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]},
             {"type": "singleton", "p": [0.0, 0.0, 1.0]}]
        ]
    })";
    std::istringstream in(text);
    const RobustMdp m = load_model(in);
    CHECK(m.num_states == 2);
    CHECK(m.num_terminals == 1);
    CHECK(m.num_actions == 2);
    CHECK(m.state_names[1] == "b");
    CHECK(m.reward[1][1] == -0.5);
    CHECK(m.uncertainty[0][1].kind() == SetKind::interval_box);
    CHECK(m.uncertainty[1][0].kind() == SetKind::vertex_list);
}

TEST_CASE("model json: invalid data raises with every violation listed") {
    const char* text = R"({
        "states": 1, "terminals": 0, "actions": 1, "discount": 0.9,
        "rewards": [[0.0]],
        "uncertainty": [[{"type": "singleton", "p": [0.7]}]]
    })";
    std::istringstream in(text);
    CHECK_THROWS_AS(load_model(in), ValidationError);
}

TEST_CASE("padded outcome values zero the terminal coordinates") {
    RobustMdp m = make_mdp(2, 2, 1, 0.9);
    const numvec padded = padded_outcome_values(m, {3.0, -1.0});
    CHECK(padded == numvec{3.0, -1.0, 0.0, 0.0});
}
