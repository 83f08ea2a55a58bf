// Apache License, Version 2.0, refer to LICENSE.txt
#include <doctest.h>

#include <cmath>

#include "radp/option/clopper_pearson.hpp"
#include "radp/rng.hpp"
#include "support/oracles.hpp"

using namespace radp;

TEST_CASE("binomial cdf agrees with the recurrence implementation") {
    Rng rng(7);
    for (int trial = 0; trial < 300; trial++) {
        const long n = 1 + rng.uniform_index(250);
        const long k = rng.uniform_index(n + 1);
        const prec_t p = rng.uniform(0.001, 0.999);
        const prec_t via_lgamma = binomial_cdf(n, k, p);
        const prec_t via_recurrence = testing::binomial_cdf_recurrence(n, k, p);
        CHECK(std::abs(via_lgamma - via_recurrence) < 1e-11);
    }
}

TEST_CASE("binomial cdf edges") {
    CHECK(binomial_cdf(10, -1, 0.5) == 0.0);
    CHECK(binomial_cdf(10, 10, 0.5) == 1.0);
    CHECK(binomial_cdf(10, 3, 0.0) == 1.0);
    CHECK(binomial_cdf(10, 3, 1.0) == 0.0);
    CHECK(binomial_cdf(1, 0, 0.25) == doctest::Approx(0.75).epsilon(1e-14));
}

TEST_CASE("clopper-pearson boundary rules are exact") {
    CHECK(clopper_pearson(0, 10, 0.05).lower == 0.0);
    CHECK(clopper_pearson(10, 10, 0.05).upper == 1.0);
}

TEST_CASE("clopper-pearson frozen midpoints") {
    // k=5, n=10, alpha=0.05: interval (0.187086..., 0.812913...).
    const BinomialInterval half = clopper_pearson(5, 10, 0.05);
    CHECK(half.lower == doctest::Approx(0.1871).epsilon(1e-3));
    CHECK(half.upper == doctest::Approx(0.8129).epsilon(1e-3));
    CHECK(half.lower == doctest::Approx(0.18708602844739855).epsilon(1e-7));
    CHECK(half.upper == doctest::Approx(0.8129139715526015).epsilon(1e-7));

    const BinomialInterval skew = clopper_pearson(2, 7, 0.1);
    CHECK(skew.lower == doctest::Approx(0.05337550047023718).epsilon(1e-7));
    CHECK(skew.upper == doctest::Approx(0.658738563844664).epsilon(1e-7));
}

TEST_CASE("interval endpoints solve the tail equations") {
    Rng rng(17);
    for (int trial = 0; trial < 100; trial++) {
        const long n = 1 + rng.uniform_index(120);
        const long k = rng.uniform_index(n + 1);
        const prec_t alpha = rng.uniform(0.01, 0.5);
        const BinomialInterval iv = clopper_pearson(k, n, alpha);

        CHECK(iv.lower <= static_cast<prec_t>(k) / n + 1e-9);
        CHECK(iv.upper >= static_cast<prec_t>(k) / n - 1e-9);
        if (k > 0) {
            // P[Bin(n, lower) >= k] = alpha/2, via the independent cdf.
            const prec_t tail = 1.0 - testing::binomial_cdf_recurrence(n, k - 1, iv.lower);
            CHECK(tail == doctest::Approx(alpha / 2).epsilon(1e-6));
        }
        if (k < n) {
            const prec_t tail = testing::binomial_cdf_recurrence(n, k, iv.upper);
            CHECK(tail == doctest::Approx(alpha / 2).epsilon(1e-6));
        }
    }
}

TEST_CASE("clopper-pearson rejects invalid arguments") {
    CHECK_THROWS_AS(clopper_pearson(0, 0, 0.05), std::invalid_argument);
    CHECK_THROWS_AS(clopper_pearson(-1, 5, 0.05), std::invalid_argument);
    CHECK_THROWS_AS(clopper_pearson(6, 5, 0.05), std::invalid_argument);
    CHECK_THROWS_AS(clopper_pearson(2, 5, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(clopper_pearson(2, 5, 1.0), std::invalid_argument);
}
