// Apache License, Version 2.0, refer to LICENSE.txt
//
// Command-line front end: exact robust solving, projected value iteration
// with exact or sampled matrices, approximate robust policy iteration, and
// the option-pricing experiment. Exit codes: 0 success, 2 validation error,
// 3 non-convergence, 4 divergence.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>

#include "radp/arpi.hpp"
#include "radp/errors.hpp"
#include "radp/exact_dp.hpp"
#include "radp/linear_fa.hpp"
#include "radp/model_io.hpp"
#include "radp/option/experiment.hpp"
#include "radp/rng.hpp"
#include "radp/sampling.hpp"

namespace {

namespace fs = std::filesystem;
using namespace radp;

constexpr int EXIT_VALIDATION = 2;
constexpr int EXIT_NON_CONVERGENCE = 3;
constexpr int EXIT_DIVERGENCE = 4;

struct OutputDir {
    std::string path;
    bool overwrite = false;

    std::ofstream open(const std::string& name) const {
        fs::create_directories(path);
        const fs::path file = fs::path(path) / name;
        if (!overwrite && fs::exists(file))
            throw ValidationError("refusing to overwrite " + file.string() +
                                  " (pass --overwrite to allow)");
        std::ofstream out(file);
        if (!out) throw ValidationError("cannot write " + file.string());
        return out;
    }
};

/// Header comment embedding the resolved configuration of the run.
void write_run_header(std::ostream& out, const nlohmann::json& config) {
    out << "# config " << config.dump() << "\n";
}

numvec parse_policy_option(const std::string& text, long num_states, long num_actions,
                           Policy& policy) {
    policy.assign(num_states, 0);
    if (text.empty()) return {};
    std::istringstream in(text);
    std::string token;
    long x = 0;
    while (std::getline(in, token, ',')) {
        if (x >= num_states) throw ValidationError("--policy lists more actions than states");
        const long u = std::stol(token);
        if (u < 0 || u >= num_actions) throw ValidationError("--policy action out of range");
        policy[x++] = u;
    }
    if (x != num_states) throw ValidationError("--policy must list one action per state");
    return {};
}

numvec default_start(const KernelFile& file) {
    if (!file.start.empty()) return file.start;
    return numvec(file.kernel.num_states(), 1.0 / static_cast<prec_t>(file.kernel.num_states()));
}

numvec projection_weights_for(const KernelFile& file) {
    if (file.kernel.num_terminals() == 0) return stationary_weights(file.kernel);
    return visit_weights(file.kernel, default_start(file));
}

int cmd_solve_exact(const std::string& model_path, prec_t tol, long max_iters,
                    const std::optional<OutputDir>& out_dir) {
    const RobustMdp model = load_model_file(model_path);
    const ExactSolution sol = solve_optimal_exact(model, tol, max_iters);

    std::printf("solved %ld states, %ld actions in %ld iterations (residual %.3e)\n",
                model.num_states, model.num_actions, sol.iterations, sol.residual);
    for (long x = 0; x < model.num_states; x++)
        std::printf("  x=%ld  V*=%.12g  action=%ld\n", x, sol.value[x], sol.policy[x]);

    if (out_dir) {
        std::ofstream csv = out_dir->open("solution.csv");
        write_run_header(csv, {{"command", "solve-exact"},
                               {"model", model_path},
                               {"tol", tol},
                               {"max_iters", max_iters}});
        csv << "state,value,action\n";
        char buffer[128];
        for (long x = 0; x < model.num_states; x++) {
            std::snprintf(buffer, sizeof(buffer), "%ld,%.17g,%ld\n", x, sol.value[x], sol.policy[x]);
            csv << buffer;
        }
    }
    return 0;
}

int cmd_check_assumptions(const std::string& model_path, const std::string& kernel_path,
                          const std::string& policy_text, bool all_actions) {
    const RobustMdp model = load_model_file(model_path);
    const KernelFile kernel = load_kernel_file(kernel_path);

    Policy policy;
    parse_policy_option(policy_text, model.num_states, model.num_actions, policy);

    const numvec d = projection_weights_for(kernel);
    std::printf("projection weights (%s):\n",
                kernel.kernel.num_terminals() == 0 ? "stationary distribution" : "expected visits");
    for (std::size_t j = 0; j < d.size(); j++) std::printf("  d[%zu] = %.12g\n", j, d[j]);

    const Assumption2Report report =
        check_assumption2(model, policy, kernel.kernel, !all_actions);
    std::printf("ratio bound beta = %.12g (%s)\n", report.beta, report.holds ? "holds" : "FAILS");
    if (report.witness_state >= 0)
        std::printf("  worst pair: x=%ld -> x'=%ld\n", report.witness_state, report.witness_next);
    return report.holds ? 0 : EXIT_VALIDATION;
}

int cmd_rpvi(const std::string& model_path, const std::string& kernel_path,
             const std::string& features_path, const std::string& policy_text, long sampled,
             std::optional<std::uint64_t> seed, bool force, prec_t tol, long max_iters,
             const std::optional<OutputDir>& out_dir) {
    const RobustMdp model = load_model_file(model_path);
    const KernelFile kernel = load_kernel_file(kernel_path);

    Policy policy;
    parse_policy_option(policy_text, model.num_states, model.num_actions, policy);

    const Eigen::MatrixXd phi = features_path.empty()
                                    ? Eigen::MatrixXd(Eigen::MatrixXd::Identity(model.num_states,
                                                                                model.num_states))
                                    : load_feature_matrix_file(features_path);

    const Assumption2Report report = check_assumption2(model, policy, kernel.kernel, true);
    std::printf("assumption check: beta = %.12g (%s)", report.beta,
                report.holds ? "holds" : "FAILS");
    if (report.witness_state >= 0)
        std::printf(", worst pair x=%ld -> x'=%ld", report.witness_state, report.witness_next);
    std::printf("\n");
    if (!report.holds && !force) {
        std::fprintf(stderr, "refusing to run with a failing ratio bound; pass --force to override\n");
        return EXIT_VALIDATION;
    }

    Eigen::VectorXd w;
    if (sampled > 0) {
        if (!seed) throw ValidationError("--sampled requires --seed for reproducibility");
        const Trajectory traj = generate_trajectory(model, kernel.kernel, policy,
                                                    default_start(kernel), *seed, sampled);
        const SampledMatrices matrices = estimate_matrices(
            traj, FeatureMap(phi.cols(), [&phi](long x) { return Eigen::VectorXd(phi.row(x)); }),
            model);
        w = rpvi_sampled(matrices, tol, max_iters);
    } else {
        const numvec d = projection_weights_for(kernel);
        w = rpvi_exact(model, policy, phi, d, tol, max_iters);
    }

    std::printf("weights:\n");
    for (long j = 0; j < w.size(); j++) std::printf("  w[%ld] = %.12g\n", j, w(j));
    std::printf("values:\n");
    const Eigen::VectorXd values = phi * w;
    for (long x = 0; x < model.num_states; x++) std::printf("  V(%ld) = %.12g\n", x, values(x));

    if (out_dir) {
        std::ofstream csv = out_dir->open("weights.csv");
        write_run_header(csv, {{"command", "rpvi"},
                               {"model", model_path},
                               {"kernel", kernel_path},
                               {"sampled", sampled},
                               {"seed", seed ? nlohmann::json(*seed) : nlohmann::json()},
                               {"tol", tol}});
        csv << "index,weight\n";
        char buffer[96];
        for (long j = 0; j < w.size(); j++) {
            std::snprintf(buffer, sizeof(buffer), "%ld,%.17g\n", j, w(j));
            csv << buffer;
        }
    }
    return 0;
}

int cmd_arpi(const std::string& model_path, const std::string& kernel_path, long samples,
             std::optional<std::uint64_t> seed, bool exhaustive, prec_t inner_tol,
             long inner_max_iters, long outer_max, const std::optional<OutputDir>& out_dir) {
    const RobustMdp model = load_model_file(model_path);

    Trajectory traj;
    if (exhaustive) {
        if (!seed) throw ValidationError("arpi requires --seed for reproducibility");
        traj = exhaustive_pairs(model, *seed);
    } else {
        if (!seed) throw ValidationError("arpi requires --seed for reproducibility");
        if (kernel_path.empty())
            throw ValidationError("arpi needs --kernel unless --exhaustive is given");
        const KernelFile kernel = load_kernel_file(kernel_path);
        // Exploration rotates uniformly through the actions along the walk.
        Trajectory base(generate_trajectory(model, kernel.kernel, Policy(model.num_states, 0),
                                            default_start(kernel), *seed, samples));
        Rng rng = Rng::stream(*seed, 0x9e3779b9);
        for (Step& step : base.steps) {
            step.action = rng.uniform_index(model.num_actions);
            step.reward = model.reward[step.state][step.action];
        }
        traj = std::move(base);
    }

    const StateActionFeatureMap features =
        StateActionFeatureMap::tabular(model.num_states, model.num_actions);
    const ArpiResult result = arpi(traj, features, model, inner_tol, inner_max_iters, outer_max);

    std::printf("arpi finished after %zu outer iterations (%s)\n", result.diagnostics.size(),
                result.converged ? "policy stable" : "outer budget reached");
    for (long x = 0; x < model.num_states; x++)
        std::printf("  x=%ld  action=%ld\n", x, result.policy[x]);

    if (out_dir) {
        std::ofstream csv = out_dir->open("arpi_diagnostics.csv");
        write_run_header(csv, {{"command", "arpi"},
                               {"model", model_path},
                               {"samples", samples},
                               {"exhaustive", exhaustive},
                               {"seed", *seed},
                               {"inner_tol", inner_tol}});
        csv << "outer,inner_iterations,inner_residual,policy_changes\n";
        char buffer[128];
        for (const ArpiIterationDiag& diag : result.diagnostics) {
            std::snprintf(buffer, sizeof(buffer), "%ld,%ld,%.17g,%ld\n", diag.outer,
                          diag.inner_iterations, diag.inner_residual, diag.policy_changes);
            csv << buffer;
        }
        std::ofstream policy_csv = out_dir->open("arpi_policy.csv");
        write_run_header(policy_csv, {{"command", "arpi"}, {"model", model_path}, {"seed", *seed}});
        policy_csv << "state,action\n";
        for (long x = 0; x < model.num_states; x++)
            policy_csv << x << "," << result.policy[x] << "\n";
    }
    return 0;
}

int cmd_price_options(const std::string& config_path, std::optional<std::uint64_t> seed_override,
                      long threads_override, bool svg, const std::optional<OutputDir>& out_dir) {
    ExperimentConfig config = load_experiment_config_file(config_path);
    if (seed_override) config.seed = *seed_override;
    if (threads_override > 0) config.threads = threads_override;

    const ExperimentResult result = run_experiment(config);

    long significant = 0;
    for (const PercentileRow& row : result.summary)
        if (row.significant) significant++;
    std::printf("experiment done: %ld repetitions, %ld/99 percentiles significant\n",
                config.repetitions, significant);
    for (long pct : {10L, 25L, 50L, 75L, 90L}) {
        const PercentileRow& row = result.summary[pct - 1];
        std::printf("  p%-3ld robust %.4f nominal %.4f (t=%.2f%s)\n", pct, row.robust_mean,
                    row.nominal_mean, row.t_statistic, row.significant ? ", significant" : "");
    }

    if (out_dir) {
        std::ofstream summary = out_dir->open("percentiles.csv");
        write_percentile_csv(summary, config, result);
        std::ofstream reps = out_dir->open("repetitions.csv");
        write_repetition_csv(reps, config, result);
        if (svg) {
            std::ofstream chart = out_dir->open("percentiles.svg");
            write_percentile_svg(chart, result);
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"robust approximate dynamic programming toolkit"};
    app.require_subcommand(1);

    std::string model_path, kernel_path, features_path, config_path, policy_text, out_path;
    bool overwrite = false, force = false, all_actions = false, exhaustive = false, svg = false;
    prec_t tol = 1e-10, inner_tol = 1e-9;
    long max_iters = 0, inner_max_iters = 100000, outer_max = 30, sampled = 0, samples = 10000,
         threads = 0;
    std::optional<std::uint64_t> seed;

    const auto add_output = [&](CLI::App* cmd) {
        cmd->add_option("--out", out_path, "output directory for CSV artifacts");
        cmd->add_flag("--overwrite", overwrite, "allow overwriting existing output files");
    };

    CLI::App* solve = app.add_subcommand("solve-exact", "exact robust value iteration");
    solve->add_option("model", model_path, "model JSON file")->required();
    solve->add_option("--tol", tol, "sup-norm residual tolerance");
    solve->add_option("--max-iters", max_iters, "iteration budget (0 = derive from discount)");
    add_output(solve);

    CLI::App* check = app.add_subcommand("check-assumptions",
                                         "projection weights and the exploration ratio bound");
    check->add_option("model", model_path)->required();
    check->add_option("--kernel", kernel_path, "exploration kernel JSON file")->required();
    check->add_option("--policy", policy_text, "comma-separated action per state (default all 0)");
    check->add_flag("--all-actions", all_actions, "check every action, covering all policies");

    CLI::App* rpvi = app.add_subcommand("rpvi", "robust projected value iteration");
    rpvi->add_option("model", model_path)->required();
    rpvi->add_option("--kernel", kernel_path)->required();
    rpvi->add_option("--features", features_path, "feature matrix JSON (default tabular)");
    rpvi->add_option("--policy", policy_text, "comma-separated action per state (default all 0)");
    rpvi->add_option("--sampled", sampled, "estimate matrices from this many sampled steps");
    rpvi->add_option("--seed", seed, "rng seed (required with --sampled)");
    rpvi->add_option("--tol", tol);
    rpvi->add_option("--max-iters", max_iters, "iteration budget (0 = library default)");
    rpvi->add_flag("--force", force, "run even when the ratio bound fails");
    add_output(rpvi);

    CLI::App* arpi_cmd = app.add_subcommand("arpi", "approximate robust policy iteration");
    arpi_cmd->add_option("model", model_path)->required();
    arpi_cmd->add_option("--kernel", kernel_path);
    arpi_cmd->add_option("--samples", samples, "sampled steps of exploration data");
    arpi_cmd->add_flag("--exhaustive", exhaustive, "one sample per (state, action) pair");
    arpi_cmd->add_option("--seed", seed, "rng seed")->required();
    arpi_cmd->add_option("--inner-tol", inner_tol);
    arpi_cmd->add_option("--inner-max-iters", inner_max_iters);
    arpi_cmd->add_option("--outer-max", outer_max);
    add_output(arpi_cmd);

    CLI::App* price = app.add_subcommand("price-options", "robust vs nominal pricing experiment");
    price->add_option("config", config_path, "experiment JSON file")->required();
    price->add_option("--seed", seed, "override the config seed");
    price->add_option("--threads", threads, "cap worker parallelism");
    price->add_flag("--svg", svg, "also write the percentile chart");
    add_output(price);

    CLI11_PARSE(app, argc, argv);

    std::optional<OutputDir> out_dir;
    if (!out_path.empty()) out_dir = OutputDir{out_path, overwrite};

    try {
        if (solve->parsed()) return cmd_solve_exact(model_path, tol, max_iters, out_dir);
        if (check->parsed())
            return cmd_check_assumptions(model_path, kernel_path, policy_text, all_actions);
        if (rpvi->parsed())
            return cmd_rpvi(model_path, kernel_path, features_path, policy_text, sampled, seed,
                            force, tol, max_iters == 0 ? 100000 : max_iters, out_dir);
        if (arpi_cmd->parsed())
            return cmd_arpi(model_path, kernel_path, samples, seed, exhaustive, inner_tol,
                            inner_max_iters, outer_max, out_dir);
        if (price->parsed())
            return cmd_price_options(config_path, seed, threads, svg, out_dir);
    } catch (const DivergenceError& err) {
        std::fprintf(stderr, "divergence: %s\n", err.what());
        return EXIT_DIVERGENCE;
    } catch (const NonConvergenceError& err) {
        std::fprintf(stderr, "non-convergence: %s\n", err.what());
        return EXIT_NON_CONVERGENCE;
    } catch (const ValidationError& err) {
        std::fprintf(stderr, "validation: %s\n", err.what());
        return EXIT_VALIDATION;
    } catch (const std::exception& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return 1;
    }
    return 0;
}
