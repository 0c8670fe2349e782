// mqt: command-line front end.
//
// Exit codes: 0 success, 1 verification failure or non-converged Markov-quantile
// limit, 2 usage or input error.

#include <algorithm>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mqt/dynamics.hpp"
#include "mqt/errors.hpp"
#include "mqt/io.hpp"
#include "mqt/markov_quantile.hpp"
#include "mqt/verify.hpp"

namespace {

constexpr std::uint64_t kDefaultSeed = 20240611;

struct RunConfig {
  std::string spec;
  std::string out;
  std::uint64_t seed = kDefaultSeed;
  double tol = 1e-9;
  int levels = 0;  // 0 keeps the spec's level_count
  std::string partition;
  int depth = 12;
  double s = 0.0;
  double t = 1.0;
  std::size_t paths = 1000;
  std::size_t steps = 100;
  double dt = 1e-4;
  std::string suite;
};

void emit(const RunConfig& cfg, const std::string& content) {
  if (cfg.out.empty())
    std::cout << content;
  else
    mqt::io::write_atomic(cfg.out, content);
}

mqt::MarginalCurve load(const RunConfig& cfg) {
  auto c = mqt::io::load_curve_spec(cfg.spec);
  return cfg.levels > 0 ? c.with_levels(cfg.levels) : c;
}

int cmd_energy(const RunConfig& cfg) {
  const auto c = load(cfg);
  mqt::RefinementOptions opts;
  opts.max_intervals = std::size_t{1} << cfg.depth;
  opts.min_depth = std::min(opts.min_depth, cfg.depth);
  auto report = mqt::io::to_json(mqt::energy(c, cfg.tol, 0.0, 1.0, opts));
  if (!cfg.partition.empty())
    report["partition_value"] = mqt::energy_partition(c, mqt::TimePartition::parse(cfg.partition));
  report["kind"] = mqt::to_string(c.kind());
  report["level_count"] = c.level_count();
  emit(cfg, report.dump(2) + "\n");
  return 0;
}

int cmd_mq(const RunConfig& cfg) {
  const auto c = load(cfg);
  const auto trace = mqt::mq_coupling_trace(c, cfg.s, cfg.t, mqt::MQConfig{cfg.tol, cfg.depth});
  auto out = mqt::io::to_json(trace);
  out["s"] = cfg.s;
  out["t"] = cfg.t;
  emit(cfg, out.dump(2) + "\n");
  if (!trace.converged) {
    std::cerr << "mqt: products did not stabilize by depth " << cfg.depth << "\n";
    return 1;
  }
  return 0;
}

int cmd_sample(const RunConfig& cfg) {
  const auto c = load(cfg);
  const auto r = mqt::TimePartition::parse(cfg.partition.empty() ? "0,1" : cfg.partition);
  emit(cfg, mqt::io::paths_csv(mqt::sample_paths(c, r, cfg.paths, cfg.seed, cfg.steps)));
  return 0;
}

int cmd_velocity(const RunConfig& cfg) {
  const auto c = load(cfg);
  const auto v = mqt::velocity_field(c, cfg.dt);
  mqt::io::CsvTable table{{"t", "x", "v"}, {}};
  for (std::size_t j = 0; j <= cfg.steps; ++j) {
    const double t = static_cast<double>(j) / static_cast<double>(cfg.steps);
    for (const auto& [x, u] : v.on_support(t)) table.rows.push_back({t, x, u});
  }
  emit(cfg, mqt::io::to_csv(table));
  return 0;
}

int cmd_residual(const RunConfig& cfg) {
  const auto c = load(cfg);
  const auto v = mqt::velocity_field(c, cfg.dt);
  auto lib = mqt::test_function_library();
  lib.push_back(mqt::random_test_function(cfg.seed));
  mqt::io::CsvTable table{{"test_function", "residual"}, {}};
  for (std::size_t i = 0; i < lib.size(); ++i)
    table.rows.push_back({static_cast<double>(i), mqt::continuity_residual(c, v, lib[i], cfg.steps)});
  emit(cfg, mqt::io::to_csv(table));
  return 0;
}

int cmd_verify(const RunConfig& cfg) {
  const auto names = mqt::verify::suite_names();
  if (std::find(names.begin(), names.end(), cfg.suite) == names.end()) {
    std::cerr << "mqt: unknown suite '" << cfg.suite << "'; known suites:";
    for (const auto& n : names) std::cerr << ' ' << n;
    std::cerr << "\n";
    return 2;
  }
  const auto rep = mqt::verify::run_suite(cfg.suite, cfg.seed);
  for (const auto& c : rep.checks) std::cerr << (c.passed ? "PASS  " : "FAIL  ") << c.name << "\n";
  emit(cfg, mqt::verify::to_json(rep).dump(2) + "\n");
  return rep.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Markov-quantile toolkit for one-dimensional curves of measures"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto positive = CLI::PositiveNumber;
  auto common = [&](CLI::App* sub, bool needs_spec) {
    auto* o = sub->add_option("--spec", cfg.spec, "Curve spec (JSON)")->check(CLI::ExistingFile);
    if (needs_spec) o->required();
    sub->add_option("--out", cfg.out, "Output file (default: stdout)");
    sub->add_option("--seed", cfg.seed, "Random seed");
    sub->add_option("--levels", cfg.levels, "Override the spec's level count")->check(positive);
  };

  auto* energy = app.add_subcommand("energy", "Energy of a curve: refined value and optional partition sum");
  common(energy, true);
  energy->add_option("--tol", cfg.tol, "Stabilization tolerance")->check(positive);
  energy->add_option("--partition", cfg.partition, "Partition such as \"0,0.5,1\"");
  energy->add_option("--depth", cfg.depth, "Largest dyadic depth")->check(CLI::Range(0, 16));

  auto* mq = app.add_subcommand("mq", "Markov-quantile coupling between two times with its trace");
  common(mq, true);
  mq->add_option("--tol", cfg.tol, "Joint-CDF stabilization tolerance")->check(positive);
  mq->add_option("--depth", cfg.depth, "Largest dyadic depth")->check(CLI::Range(1, 16));
  mq->add_option("-s,--from", cfg.s, "Start time")->check(CLI::Range(0.0, 1.0));
  mq->add_option("-t,--to", cfg.t, "End time")->check(CLI::Range(0.0, 1.0));

  auto* sample = app.add_subcommand("sample", "Sample paths of the quantile process made Markov at a partition");
  common(sample, true);
  sample->add_option("--partition", cfg.partition, "Markov times, e.g. \"0,0.5,1\"");
  sample->add_option("--paths", cfg.paths, "Number of paths")->check(positive);
  sample->add_option("--steps", cfg.steps, "Uniform time steps")->check(positive);

  auto* velocity = app.add_subcommand("velocity", "Minimal velocity field on the support as (t, x, v)");
  common(velocity, true);
  velocity->add_option("--steps", cfg.steps, "Uniform time steps")->check(positive);
  velocity->add_option("--dt", cfg.dt, "Difference half-width")->check(CLI::Range(1e-12, 0.49));

  auto* residual = app.add_subcommand("residual", "Weak continuity-equation residuals of the minimal field");
  common(residual, true);
  residual->add_option("--steps", cfg.steps, "Quadrature cells in time")->check(positive);
  residual->add_option("--dt", cfg.dt, "Difference half-width")->check(CLI::Range(1e-12, 0.49));

  auto* verify = app.add_subcommand("verify", "Run a self-check suite");
  verify->add_option("suite", cfg.suite, "energy | action-equality | markov | mq | oracle | continuity | all")
      ->required();
  verify->add_option("--out", cfg.out, "JSON summary file (default: stdout)");
  verify->add_option("--seed", cfg.seed, "Random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*energy) return cmd_energy(cfg);
    if (*mq) return cmd_mq(cfg);
    if (*sample) return cmd_sample(cfg);
    if (*velocity) return cmd_velocity(cfg);
    if (*residual) return cmd_residual(cfg);
    if (*verify) return cmd_verify(cfg);
  } catch (const mqt::ParseError& e) {
    std::cerr << "mqt: " << e.what() << "\n";
    return 2;
  } catch (const mqt::PreconditionError& e) {
    std::cerr << "mqt: " << e.what() << "\n";
    return 2;
  } catch (const mqt::DomainError& e) {
    std::cerr << "mqt: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "mqt: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
