// nsqn: experiment driver and verification commands.
//
//   nsqn run <config> [--seed N] [--out PATH] [--override key=value]...
//   nsqn grad-check [--seed N]
//   nsqn oracle-check [--seed N] [--trials N]
//   nsqn cost [--n N] [--b B] [--d D] [--m-L M] [--m-F M] [--L L] [--zeta Z]

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "nsqn/checks.hpp"
#include "nsqn/config.hpp"
#include "nsqn/errors.hpp"
#include "nsqn/experiment.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw nsqn::IoError("cannot open config " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int cmd_run(const std::string& config_path, const std::optional<std::uint64_t>& seed,
            const std::optional<std::string>& out, const std::vector<std::string>& overrides) {
    std::string text = read_file(config_path);
    text += '\n';
    for (const auto& kv : overrides) {
        if (kv.find('=') == std::string::npos) throw nsqn::ConfigError("--override expects key=value, got " + kv);
        text += kv + '\n';
    }
    if (seed) text += "seed = " + std::to_string(*seed) + '\n';
    if (out) text += "output.csv = " + *out + '\n';

    const nsqn::ExperimentConfig cfg = nsqn::parse_config(text);
    std::cerr << "task=" << nsqn::to_string(cfg.task) << " optimizer=" << nsqn::to_string(cfg.optimizer)
              << " seed=" << cfg.seed << " epochs=" << cfg.epochs << " -> " << cfg.output << '\n';

    const nsqn::RunSummary summary = nsqn::run_experiment(cfg);
    std::printf("termination: %s\n", std::string(nsqn::to_string(summary.termination)).c_str());
    if (!summary.message.empty()) std::printf("message: %s\n", summary.message.c_str());
    std::printf("iterations: %llu\n", static_cast<unsigned long long>(summary.iterations));
    std::printf("final loss: %.6g\n", summary.final_loss);
    std::printf("final %s: %.6g\n", cfg.task == nsqn::Task::Counting ? "mse" : "accuracy", summary.final_metric);
    std::printf("wall time: %.1f s\n", summary.wall_ms / 1000.0);
    return summary.termination == nsqn::Termination::NumericError ? 3 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stochastic Nesterov-accelerated quasi-Newton training harness"};
    app.require_subcommand(1);

    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::vector<std::string> overrides;
    std::string config_path;

    auto* run = app.add_subcommand("run", "Train per a config file and write a metrics CSV");
    run->add_option("config", config_path, "Config file (key = value lines)")->required()->check(CLI::ExistingFile);
    run->add_option("--seed", seed, "Override the config seed");
    run->add_option("--out", out, "Override output.csv");
    run->add_option("--override", overrides, "key=value applied after the file (repeatable)");

    std::uint64_t check_seed = 1;
    bool corrupt = false;
    auto* grad = app.add_subcommand("grad-check", "Finite-difference check of BPTT gradients");
    grad->add_option("--seed", check_seed, "Random seed");
    grad->add_flag("--corrupt-gradient", corrupt, "Test hook: perturb the analytic gradient")->group("");

    std::size_t trials = 100;
    auto* oracle = app.add_subcommand("oracle-check", "Two-loop / aFIM / secant equivalence against dense oracles");
    oracle->add_option("--seed", check_seed, "Random seed");
    oracle->add_option("--trials", trials, "Random trials per suite")->check(CLI::PositiveNumber);

    nsqn::CostModelInput shape{nsqn::Algorithm::Asnaq, 60000, 128, 1000, 10, 100, 5, 1};
    auto* cost = app.add_subcommand("cost", "Per-iteration compute and storage cost table");
    cost->add_option("--n", shape.n, "Training-set size")->check(CLI::PositiveNumber);
    cost->add_option("--b", shape.b, "Mini-batch size")->check(CLI::PositiveNumber);
    cost->add_option("--d", shape.d, "Parameter count")->check(CLI::PositiveNumber);
    cost->add_option("--m-L", shape.m_L, "Curvature pair memory")->check(CLI::PositiveNumber);
    cost->add_option("--m-F", shape.m_F, "aFIM buffer size")->check(CLI::PositiveNumber);
    cost->add_option("--L", shape.L, "Aggregation period")->check(CLI::PositiveNumber);
    cost->add_option("--zeta", shape.zeta, "Line-search evaluations")->check(CLI::NonNegativeNumber);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return cmd_run(config_path, seed, out, overrides);
        if (*grad) {
            const auto report = nsqn::run_grad_check(check_seed, corrupt);
            std::cout << report.to_text();
            return report.passed() ? 0 : 1;
        }
        if (*oracle) {
            const auto report = nsqn::run_oracle_check(check_seed, trials);
            std::cout << report.to_text();
            return report.passed() ? 0 : 1;
        }
        if (*cost) {
            std::cout << nsqn::format_cost_table(shape, nsqn::cost_table(shape));
            return 0;
        }
    } catch (const nsqn::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const nsqn::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
