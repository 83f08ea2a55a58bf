// Apache License, Version 2.0, refer to LICENSE.txt
#include "radp/option/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <thread>

#include "radp/errors.hpp"
#include "radp/rng.hpp"
#include "radp/stats.hpp"

namespace radp {

namespace {

using nlohmann::json;

json config_to_json(const ExperimentConfig& c) {
    return json{{"up_factor", c.up_factor},
                {"down_factor", c.down_factor},
                {"true_up_prob", c.true_up_prob},
                {"horizon", c.horizon},
                {"strike", c.strike},
                {"initial_price", c.initial_price},
                {"discount", c.discount},
                {"start_jitter", c.start_jitter},
                {"alpha", c.alpha},
                {"num_data_paths", c.num_data_paths},
                {"num_sim_paths", c.num_sim_paths},
                {"num_test_paths", c.num_test_paths},
                {"repetitions", c.repetitions},
                {"rbf_grid", c.rbf_grid},
                {"rbf_price_lo", c.rbf_price_lo},
                {"rbf_price_hi", c.rbf_price_hi},
                {"inner_tol", c.inner_tol},
                {"inner_max_iters", c.inner_max_iters},
                {"outer_max_iters", c.outer_max_iters},
                {"significance", c.significance},
                {"seed", c.seed},
                {"threads", c.threads}};
}

template <typename T>
void maybe_read(const json& doc, const char* key, T& field) {
    if (doc.contains(key)) field = doc.at(key).get<T>();
}

}  // namespace

std::string ExperimentConfig::to_json_string() const { return config_to_json(*this).dump(); }

ExperimentConfig load_experiment_config(std::istream& in) {
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& err) {
        throw ValidationError(std::string("experiment config: ") + err.what());
    }

    ExperimentConfig c;
    maybe_read(doc, "up_factor", c.up_factor);
    maybe_read(doc, "down_factor", c.down_factor);
    maybe_read(doc, "true_up_prob", c.true_up_prob);
    maybe_read(doc, "horizon", c.horizon);
    maybe_read(doc, "strike", c.strike);
    maybe_read(doc, "initial_price", c.initial_price);
    maybe_read(doc, "discount", c.discount);
    maybe_read(doc, "start_jitter", c.start_jitter);
    maybe_read(doc, "alpha", c.alpha);
    maybe_read(doc, "num_data_paths", c.num_data_paths);
    maybe_read(doc, "num_sim_paths", c.num_sim_paths);
    maybe_read(doc, "num_test_paths", c.num_test_paths);
    maybe_read(doc, "repetitions", c.repetitions);
    maybe_read(doc, "rbf_grid", c.rbf_grid);
    maybe_read(doc, "rbf_price_lo", c.rbf_price_lo);
    maybe_read(doc, "rbf_price_hi", c.rbf_price_hi);
    maybe_read(doc, "inner_tol", c.inner_tol);
    maybe_read(doc, "inner_max_iters", c.inner_max_iters);
    maybe_read(doc, "outer_max_iters", c.outer_max_iters);
    maybe_read(doc, "significance", c.significance);
    maybe_read(doc, "threads", c.threads);
    if (!doc.contains("seed"))
        throw ValidationError("experiment config: 'seed' is required for reproducibility");
    c.seed = doc.at("seed").get<std::uint64_t>();

    BernoulliPriceModel probe{c.up_factor, c.down_factor, c.true_up_prob, c.initial_price, c.horizon};
    const std::vector<std::string> problems = probe.invariant_violations();
    if (!problems.empty()) {
        std::string msg = "experiment config:";
        for (const std::string& p : problems) msg += "\n  " + p;
        throw ValidationError(msg);
    }
    return c;
}

ExperimentConfig load_experiment_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open experiment config: " + path);
    return load_experiment_config(in);
}

RepetitionOutcome run_repetition(const ExperimentConfig& config, long repetition) {
    const BernoulliPriceModel truth{config.up_factor, config.down_factor, config.true_up_prob,
                                    config.initial_price, config.horizon};
    const OptionSpec option{config.strike};
    const RbfFeatureMap rbf = RbfFeatureMap::grid(config.rbf_grid, config.rbf_price_lo,
                                                  config.rbf_price_hi, config.initial_price,
                                                  config.horizon);
    const PriceTimeFeatures features = [&rbf](prec_t price, long t) { return rbf(price, t); };

    // Three independent stream families per repetition: data, simulation, test.
    const std::uint64_t base = mix64(config.seed) + 0x100000 * static_cast<std::uint64_t>(repetition);

    const std::vector<numvec> data_paths =
        simulate_price_paths(truth, config.num_data_paths, base + 1, 0.0);
    const UncertainUpProbability fitted =
        fit_model(data_paths, config.up_factor, config.down_factor, config.alpha);

    // Simulated training data follow the fitted up-probability (the policy
    // that never exercises), with jittered start prices.
    BernoulliPriceModel fitted_model = truth;
    fitted_model.up_prob = std::min(prec_t(1.0 - 1e-12), std::max(prec_t(1e-12), fitted.mle));
    const std::vector<numvec> sim_paths =
        simulate_price_paths(fitted_model, config.num_sim_paths, base + 2, config.start_jitter);
    const PricingDataset dataset =
        build_pricing_dataset(sim_paths, features, rbf.dim(), truth, option);

    const PricingArpiResult robust = arpi_price(dataset, fitted, config.discount, config.inner_tol,
                                                config.inner_max_iters, config.outer_max_iters);
    const PricingArpiResult nominal =
        arpi_price(dataset, fitted.nominal(), config.discount, config.inner_tol,
                   config.inner_max_iters, config.outer_max_iters);

    const std::vector<numvec> test_paths =
        simulate_price_paths(truth, config.num_test_paths, base + 3, config.start_jitter);

    const ExercisePolicy robust_policy{robust.weights, features, option, config.horizon};
    const ExercisePolicy nominal_policy{nominal.weights, features, option, config.horizon};

    numvec robust_payoffs(test_paths.size()), nominal_payoffs(test_paths.size());
    for (std::size_t i = 0; i < test_paths.size(); i++) {
        robust_payoffs[i] = realized_payoff(robust_policy, test_paths[i], config.discount);
        nominal_payoffs[i] = realized_payoff(nominal_policy, test_paths[i], config.discount);
    }

    RepetitionOutcome outcome;
    outcome.p_hat = fitted.mle;
    outcome.p_lower = fitted.lower;
    outcome.p_upper = fitted.upper;
    outcome.robust_percentiles.resize(99);
    outcome.nominal_percentiles.resize(99);

    numvec robust_sorted = robust_payoffs, nominal_sorted = nominal_payoffs;
    std::sort(robust_sorted.begin(), robust_sorted.end());
    std::sort(nominal_sorted.begin(), nominal_sorted.end());
    const long n = static_cast<long>(robust_sorted.size());
    for (long pct = 1; pct <= 99; pct++) {
        const long rank = (pct * n + 99) / 100;
        outcome.robust_percentiles[pct - 1] = robust_sorted[rank - 1];
        outcome.nominal_percentiles[pct - 1] = nominal_sorted[rank - 1];
    }
    for (prec_t v : robust_payoffs) outcome.robust_mean += v;
    for (prec_t v : nominal_payoffs) outcome.nominal_mean += v;
    outcome.robust_mean /= static_cast<prec_t>(n);
    outcome.nominal_mean /= static_cast<prec_t>(n);
    return outcome;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
    if (config.repetitions < 2)
        throw ValidationError("experiment needs at least 2 repetitions for the paired test");

    ExperimentResult result;
    result.repetitions.resize(config.repetitions);

    long workers = config.threads > 0
                       ? config.threads
                       : static_cast<long>(std::thread::hardware_concurrency());
    workers = std::max(1L, std::min(workers, config.repetitions));

    std::atomic<long> cursor{0};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> failures(workers);
    for (long worker = 0; worker < workers; worker++) {
        pool.emplace_back([&, worker]() {
            try {
                for (long r = cursor.fetch_add(1); r < config.repetitions; r = cursor.fetch_add(1))
                    result.repetitions[r] = run_repetition(config, r);
            } catch (...) {
                failures[worker] = std::current_exception();
            }
        });
    }
    for (std::thread& t : pool) t.join();
    for (const std::exception_ptr& err : failures)
        if (err) std::rethrow_exception(err);

    result.summary.resize(99);
    numvec robust(config.repetitions), nominal(config.repetitions);
    for (long pct = 1; pct <= 99; pct++) {
        for (long r = 0; r < config.repetitions; r++) {
            robust[r] = result.repetitions[r].robust_percentiles[pct - 1];
            nominal[r] = result.repetitions[r].nominal_percentiles[pct - 1];
        }
        const PairedTTest test = paired_t_test(robust, nominal);

        PercentileRow& row = result.summary[pct - 1];
        row.percentile = pct;
        for (long r = 0; r < config.repetitions; r++) {
            row.robust_mean += robust[r];
            row.nominal_mean += nominal[r];
        }
        row.robust_mean /= static_cast<prec_t>(config.repetitions);
        row.nominal_mean /= static_cast<prec_t>(config.repetitions);
        row.t_statistic = test.t_statistic;
        row.p_value = test.p_value;
        row.significant = test.p_value < config.significance;
    }
    return result;
}

void write_percentile_csv(std::ostream& out, const ExperimentConfig& config,
                          const ExperimentResult& result) {
    out << "# config " << config.to_json_string() << "\n";
    out << "percentile,robust_mean,nominal_mean,t_statistic,p_value,significant\n";
    char buffer[256];
    for (const PercentileRow& row : result.summary) {
        std::snprintf(buffer, sizeof(buffer), "%ld,%.10g,%.10g,%.10g,%.10g,%d\n", row.percentile,
                      row.robust_mean, row.nominal_mean, row.t_statistic, row.p_value,
                      row.significant ? 1 : 0);
        out << buffer;
    }
}

void write_repetition_csv(std::ostream& out, const ExperimentConfig& config,
                          const ExperimentResult& result) {
    out << "# config " << config.to_json_string() << "\n";
    out << "repetition,p_hat,p_lower,p_upper,robust_mean_payoff,nominal_mean_payoff\n";
    char buffer[256];
    for (std::size_t r = 0; r < result.repetitions.size(); r++) {
        const RepetitionOutcome& rep = result.repetitions[r];
        std::snprintf(buffer, sizeof(buffer), "%zu,%.10g,%.10g,%.10g,%.10g,%.10g\n", r, rep.p_hat,
                      rep.p_lower, rep.p_upper, rep.robust_mean, rep.nominal_mean);
        out << buffer;
    }
}

void write_percentile_svg(std::ostream& out, const ExperimentResult& result) {
    const long width = 720, height = 480, margin = 50;
    prec_t top = 0.0;
    for (const PercentileRow& row : result.summary)
        top = std::max({top, row.robust_mean, row.nominal_mean});
    if (top <= 0.0) top = 1.0;

    const auto sx = [&](prec_t pct) {
        return margin + (pct - 1.0) / 98.0 * static_cast<prec_t>(width - 2 * margin);
    };
    const auto sy = [&](prec_t value) {
        return height - margin - value / top * static_cast<prec_t>(height - 2 * margin);
    };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\"" << width - margin
        << "\" y2=\"" << height - margin << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin << "\" y2=\""
        << height - margin << "\" stroke=\"black\"/>\n";

    const auto polyline = [&](bool robust, const char* color) {
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (const PercentileRow& row : result.summary)
            out << sx(static_cast<prec_t>(row.percentile)) << ","
                << sy(robust ? row.robust_mean : row.nominal_mean) << " ";
        out << "\"/>\n";
    };
    polyline(true, "#d62728");
    polyline(false, "#1f77b4");

    for (const PercentileRow& row : result.summary) {
        if (!row.significant) continue;
        out << "<text x=\"" << sx(static_cast<prec_t>(row.percentile)) << "\" y=\""
            << sy(std::max(row.robust_mean, row.nominal_mean)) - 6
            << "\" font-size=\"10\" text-anchor=\"middle\">*</text>\n";
    }
    out << "<text x=\"" << width / 2 << "\" y=\"" << height - 12
        << "\" font-size=\"12\" text-anchor=\"middle\">percentile of realized payoff</text>\n";
    out << "<text x=\"" << width - margin << "\" y=\"" << margin
        << "\" font-size=\"12\" text-anchor=\"end\" fill=\"#d62728\">robust</text>\n";
    out << "<text x=\"" << width - margin << "\" y=\"" << margin + 16
        << "\" font-size=\"12\" text-anchor=\"end\" fill=\"#1f77b4\">nominal</text>\n";
    out << "</svg>\n";
}

}  // namespace radp
