// Apache License, Version 2.0, refer to LICENSE.txt
#include <doctest.h>

#include <cmath>

#include "radp/errors.hpp"
#include "radp/rng.hpp"
#include "radp/sigma.hpp"
#include "support/oracles.hpp"

using namespace radp;

TEST_CASE("sigma_singleton is the dot product") {
    CHECK(sigma_singleton({1.0, 2.0}, {0.5, 0.5}).value == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(sigma_singleton({0.0, 0.0}, {0.3, 0.7}).value == 0.0);
    CHECK(sigma_singleton({3.0}, {1.0}).value == 3.0);
    CHECK_THROWS_AS(sigma_singleton({1.0, 2.0}, {1.0}), std::invalid_argument);
}

TEST_CASE("sigma_interval: greedy mass shift onto low values") {
    // Verified against the vertex-enumeration oracle below.
    const SigmaResult a = sigma_interval({1.0, 2.0, 3.0}, {0.1, 0.1, 0.1}, {0.8, 0.8, 0.8});
    CHECK(a.value == doctest::Approx(1.3).epsilon(1e-14));
    CHECK(a.minimizer[0] == doctest::Approx(0.8));
    CHECK(a.minimizer[1] == doctest::Approx(0.1));
    CHECK(a.minimizer[2] == doctest::Approx(0.1));

    const SigmaResult b = sigma_interval({10.0, 0.0}, {0.3, 0.3}, {0.7, 0.7});
    CHECK(b.value == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(b.minimizer[0] == doctest::Approx(0.3));
    CHECK(b.minimizer[1] == doctest::Approx(0.7));
}

TEST_CASE("sigma_interval: degenerate box reduces to the singleton") {
    const numvec v{2.0, -1.0, 0.5};
    const numvec p{0.2, 0.5, 0.3};
    CHECK(sigma_interval(v, p, p).value == doctest::Approx(sigma_singleton(v, p).value));
}

TEST_CASE("sigma_interval rejects infeasible boxes") {
    CHECK_THROWS_AS(sigma_interval({1.0, 1.0}, {0.6, 0.6}, {0.7, 0.7}), ValidationError);
    CHECK_THROWS_AS(sigma_interval({1.0, 1.0}, {0.0, 0.0}, {0.3, 0.3}), ValidationError);
}

TEST_CASE("sigma_vertices: minimum over the list with first-index ties") {
    const SigmaResult a = sigma_vertices({5.0, 2.0}, {{1.0, 0.0}, {0.0, 1.0}});
    CHECK(a.value == 2.0);
    CHECK(a.minimizer == numvec{0.0, 1.0});

    CHECK(sigma_vertices({4.0, 1.0}, {{0.25, 0.75}}).value == doctest::Approx(1.75));

    // Equal-value vertices: the first one is returned.
    const SigmaResult tie = sigma_vertices({1.0, 1.0}, {{0.7, 0.3}, {0.3, 0.7}});
    CHECK(tie.minimizer == numvec{0.7, 0.3});

    CHECK_THROWS_AS(sigma_vertices({1.0}, {}), std::invalid_argument);
}

TEST_CASE("sigma_oracle trivial cases") {
    const UncertaintySet single = UncertaintySet::singleton({0.25, 0.75});
    const numvec v{2.0, 6.0};
    CHECK(sigma_oracle(v, single).value == doctest::Approx(sigma_singleton(v, {0.25, 0.75}).value));

    // Full simplex: the minimum sits at the smallest coordinate of v.
    const UncertaintySet simplex = UncertaintySet::interval_box({0.0, 0.0, 0.0}, {1.0, 1.0, 1.0});
    const SigmaResult res = sigma_oracle({4.0, -2.0, 7.0}, simplex);
    CHECK(res.value == doctest::Approx(-2.0));

    const UncertaintySet degenerate = UncertaintySet::interval_box({0.5, 0.5}, {0.5, 0.5});
    CHECK(sigma_oracle({1.0, 3.0}, degenerate).value == doctest::Approx(2.0));
}

TEST_CASE("sigma_interval agrees with the enumeration oracle on random boxes") {
    Rng rng(7);
    for (int trial = 0; trial < 400; trial++) {
        const long dim = 2 + rng.uniform_index(5);  // up to 6
        const UncertaintySet box = testing::random_box(rng, dim, 0.4);
        numvec v(dim);
        for (long i = 0; i < dim; i++) v[i] = rng.uniform(-5.0, 5.0);

        const SigmaResult fast = sigma_interval(v, box.lower(), box.upper());
        const SigmaResult slow = sigma_oracle(v, box);
        CHECK(std::abs(fast.value - slow.value) <= 1e-10);
        CHECK(box.contains(fast.minimizer, 1e-9));
    }
}

TEST_CASE("sigma properties: monotonicity, constant shift, sup-norm Lipschitz") {
    Rng rng(13);
    for (int trial = 0; trial < 200; trial++) {
        const long dim = 2 + rng.uniform_index(5);
        const UncertaintySet box = testing::random_box(rng, dim, 0.3);
        numvec v(dim), w(dim);
        for (long i = 0; i < dim; i++) {
            v[i] = rng.uniform(-3.0, 3.0);
            w[i] = rng.uniform(-3.0, 3.0);
        }

        const prec_t sv = sigma_interval(v, box.lower(), box.upper()).value;
        const prec_t sw = sigma_interval(w, box.lower(), box.upper()).value;

        // monotone: v <= v + positive bump
        numvec higher = v;
        for (long i = 0; i < dim; i++) higher[i] += rng.uniform(0.0, 2.0);
        CHECK(sigma_interval(higher, box.lower(), box.upper()).value >= sv - 1e-12);

        // constant shift moves the value by exactly the constant
        const prec_t c = rng.uniform(-2.0, 2.0);
        numvec shifted = v;
        for (long i = 0; i < dim; i++) shifted[i] += c;
        CHECK(sigma_interval(shifted, box.lower(), box.upper()).value ==
              doctest::Approx(sv + c).epsilon(1e-12));

        // 1-Lipschitz in the sup norm
        prec_t gap = 0.0;
        for (long i = 0; i < dim; i++) gap = std::max(gap, std::abs(v[i] - w[i]));
        CHECK(std::abs(sv - sw) <= gap + 1e-12);

        // minimizer consistency: value equals minimizer . v and membership holds
        const SigmaResult full = sigma_interval(v, box.lower(), box.upper());
        prec_t dot = 0.0;
        for (long i = 0; i < dim; i++) dot += full.minimizer[i] * v[i];
        CHECK(dot == doctest::Approx(full.value).epsilon(1e-9));
        CHECK(box.contains(full.minimizer, 1e-9));
    }
}
