#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <unistd.h>

#include "nsqn/config.hpp"
#include "nsqn/experiment.hpp"

using namespace nsqn;
namespace fs = std::filesystem;

namespace {

std::string without_last_column(const fs::path& csv) {
    std::ifstream in(csv);
    std::ostringstream out;
    for (std::string line; std::getline(in, line);) out << line.substr(0, line.rfind(',')) << '\n';
    return out.str();
}

}  // namespace

TEST_CASE("format_row and header") {
    CHECK(std::string(kMetricsHeader) == "epoch,step,loss,metric,mu,n_pairs,n_fim,resets,grad_evals,wall_ms");
    const MetricsRow r{3, 600, 1.5, 0.25, 0.99, 10, 100, 2, 1450, 12.3456};
    CHECK(format_row(r) == "3,600,1.5,0.25,0.99,10,100,2,1450,12.346");
}

TEST_CASE("two-epoch counting run: two rows, loss decreases, CSV reproducible") {
    const fs::path dir = fs::temp_directory_path() / ("nsqn_exp_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    ExperimentConfig cfg = parse_config("task = counting\noptimizer = asnaq\ntrain.epochs = 2\nseed = 3\n");

    cfg.output = (dir / "a.csv").string();
    const RunSummary a = run_experiment(cfg);
    REQUIRE(a.rows.size() == 2);
    CHECK(a.rows[1].loss < a.rows[0].loss);
    CHECK(a.termination == Termination::EpochsDone);
    CHECK(a.iterations == 2 * 10000 / 50);
    for (const auto& r : a.rows) {
        CHECK(r.mu >= cfg.hp.mu_min);
        CHECK(r.mu <= cfg.hp.mu_max);
        CHECK(r.metric >= 0.0);
        CHECK(r.loss >= 0.0);
    }
    CHECK(parse_config([&] {
              std::ifstream in(cfg.output + ".config");
              std::stringstream ss;
              ss << in.rdbuf();
              return ss.str();
          }()) == cfg);

    cfg.output = (dir / "b.csv").string();
    run_experiment(cfg);
    CHECK(without_last_column(dir / "a.csv") == without_last_column(dir / "b.csv"));
    fs::remove_all(dir);
}

TEST_CASE("k_max stops the run and log_every adds rows") {
    ExperimentConfig cfg =
        parse_config("task = counting\noptimizer = adagrad\ntask.n_samples = 500\nhp.k_max = 25\ntrain.log_every = 10\n");
    RunOptions opt;
    opt.write_files = false;
    const RunSummary s = run_experiment(cfg, opt);
    CHECK(s.termination == Termination::KMax);
    CHECK(s.iterations == 25);
    REQUIRE(s.rows.size() == 3);
    CHECK(s.rows[0].step == 10);
    CHECK(s.rows[1].step == 20);
    CHECK(s.rows[2].step == 25);
}

TEST_CASE("observer sees every step and the evaluation counter") {
    ExperimentConfig cfg = parse_config("task = counting\noptimizer = asnaq\ntask.n_samples = 500\ntrain.epochs = 1\n");
    RunOptions opt;
    opt.write_files = false;
    std::uint64_t steps = 0, cycles = 0;
    opt.observer = [&](const StepEvent& e) {
        ++steps;
        cycles += e.optimizer.last_report()->error_control_evaluated;
        CHECK(e.gradient_calls == 2 * e.optimizer.iterations());
        CHECK(e.grad_evals == e.gradient_calls + 2 * cycles);
    };
    run_experiment(cfg, opt);
    CHECK(steps == 10);
}

TEST_CASE("full-batch baselines take one step per epoch") {
    ExperimentConfig cfg =
        parse_config("task = counting\noptimizer = naq\ntask.n_samples = 200\ntask.T = 4\nmodel.n_hidden = 4\ntrain.epochs = 3\n");
    RunOptions opt;
    opt.write_files = false;
    const RunSummary s = run_experiment(cfg, opt);
    CHECK(s.iterations == 3);
    CHECK(s.rows.size() == 3);
}
