// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "radp/option/pricing.hpp"
#include "radp/types.hpp"

namespace radp {

/**
 * Repeated pricing experiment: per repetition, fit an up-probability (with
 * its confidence interval) from fresh data, train exercise policies with and
 * without the uncertainty on a shared simulated data set, and score both on
 * a shared test set from the true model. Percentiles of the realized
 * discounted payoffs are then compared across repetitions with paired
 * t-tests.
 */
struct ExperimentConfig {
    prec_t up_factor = 1.02;
    prec_t down_factor = 0.98;
    prec_t true_up_prob = 0.5;
    long horizon = 20;
    prec_t strike = 100.0;
    prec_t initial_price = 100.0;
    prec_t discount = 0.999;
    prec_t start_jitter = 2.0;
    prec_t alpha = 0.05;
    long num_data_paths = 10;
    long num_sim_paths = 2000;
    long num_test_paths = 5000;
    long repetitions = 200;

    long rbf_grid = 7;
    prec_t rbf_price_lo = 0.7;
    prec_t rbf_price_hi = 1.3;

    prec_t inner_tol = 1e-6;
    long inner_max_iters = 2000;
    long outer_max_iters = 30;
    prec_t significance = 0.05;

    std::uint64_t seed = 1;
    long threads = 0;  // 0 = all hardware threads

    std::string to_json_string() const;
};

ExperimentConfig load_experiment_config(std::istream& in);
ExperimentConfig load_experiment_config_file(const std::string& path);

struct RepetitionOutcome {
    prec_t p_hat = 0.0;
    prec_t p_lower = 0.0;
    prec_t p_upper = 0.0;
    numvec robust_percentiles;   // indices 0..98 hold percentiles 1..99
    numvec nominal_percentiles;
    prec_t robust_mean = 0.0;
    prec_t nominal_mean = 0.0;
};

struct PercentileRow {
    long percentile = 0;
    prec_t robust_mean = 0.0;
    prec_t nominal_mean = 0.0;
    prec_t t_statistic = 0.0;
    prec_t p_value = 1.0;
    bool significant = false;
};

struct ExperimentResult {
    std::vector<RepetitionOutcome> repetitions;
    std::vector<PercentileRow> summary;  // percentiles 1..99
};

/// Run one repetition with its own derived random streams.
RepetitionOutcome run_repetition(const ExperimentConfig& config, long repetition);

/// Run the full experiment; repetitions execute in parallel on up to
/// config.threads workers with per-repetition streams, so results do not
/// depend on the scheduling.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// percentile, robust_mean, nominal_mean, t_stat, p_value, significant.
void write_percentile_csv(std::ostream& out, const ExperimentConfig& config,
                          const ExperimentResult& result);

/// One row per repetition: fitted interval and mean payoffs.
void write_repetition_csv(std::ostream& out, const ExperimentConfig& config,
                          const ExperimentResult& result);

/// Percentile curves with significance markers, as a standalone SVG.
void write_percentile_svg(std::ostream& out, const ExperimentResult& result);

}  // namespace radp
