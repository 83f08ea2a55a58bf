// Apache License, Version 2.0, refer to LICENSE.txt
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "radp/errors.hpp"
#include "radp/option/experiment.hpp"

using namespace radp;

namespace {

ExperimentConfig tiny_config() {
    ExperimentConfig c;
    c.horizon = 8;
    c.num_data_paths = 5;
    c.num_sim_paths = 150;
    c.num_test_paths = 300;
    c.repetitions = 4;
    c.rbf_grid = 4;
    c.inner_tol = 1e-6;
    c.seed = 2024;
    c.threads = 2;
    return c;
}

}  // namespace

TEST_CASE("experiment config json: defaults, required seed, validation") {
    std::istringstream good(R"({"seed": 7, "horizon": 12, "alpha": 0.1})");
    const ExperimentConfig c = load_experiment_config(good);
    CHECK(c.seed == 7);
    CHECK(c.horizon == 12);
    CHECK(c.alpha == 0.1);
    CHECK(c.up_factor == 1.02);  // default preserved

    std::istringstream missing_seed(R"({"horizon": 12})");
    CHECK_THROWS_AS(load_experiment_config(missing_seed), ValidationError);

    std::istringstream bad(R"({"seed": 1, "up_factor": 0.9, "down_factor": 0.95})");
    CHECK_THROWS_AS(load_experiment_config(bad), ValidationError);
}

TEST_CASE("tiny experiment runs and is deterministic across thread counts") {
    const ExperimentConfig config = tiny_config();
    const ExperimentResult a = run_experiment(config);
    REQUIRE(a.summary.size() == 99);
    REQUIRE(a.repetitions.size() == 4);

    ExperimentConfig serial = config;
    serial.threads = 1;
    const ExperimentResult b = run_experiment(serial);
    for (int pct = 0; pct < 99; pct++) {
        CHECK(a.summary[pct].robust_mean == b.summary[pct].robust_mean);
        CHECK(a.summary[pct].nominal_mean == b.summary[pct].nominal_mean);
    }

    // Payoffs are bounded by the strike and never negative.
    for (const RepetitionOutcome& rep : a.repetitions) {
        CHECK(rep.robust_mean >= 0.0);
        CHECK(rep.robust_mean <= config.strike);
        CHECK(rep.p_lower <= rep.p_hat + 1e-12);
        CHECK(rep.p_upper >= rep.p_hat - 1e-12);
    }
}

TEST_CASE("near-degenerate intervals make robust and nominal coincide") {
    ExperimentConfig config = tiny_config();
    config.alpha = 0.9999;  // interval collapses onto the estimate
    config.num_data_paths = 200;
    config.repetitions = 3;
    const ExperimentResult result = run_experiment(config);
    for (const PercentileRow& row : result.summary)
        CHECK(std::abs(row.robust_mean - row.nominal_mean) < 0.2);
}

TEST_CASE("csv writers embed the config header") {
    const ExperimentConfig config = tiny_config();
    const ExperimentResult result = run_experiment(config);

    std::ostringstream summary;
    write_percentile_csv(summary, config, result);
    const std::string text = summary.str();
    CHECK(text.find("# config {") == 0);
    CHECK(text.find("\"seed\":2024") != std::string::npos);
    CHECK(text.find("percentile,robust_mean") != std::string::npos);

    std::ostringstream reps;
    write_repetition_csv(reps, config, result);
    CHECK(reps.str().find("repetition,p_hat") != std::string::npos);

    std::ostringstream svg;
    write_percentile_svg(svg, result);
    CHECK(svg.str().find("<svg") == 0);
    CHECK(svg.str().find("</svg>") != std::string::npos);
}
