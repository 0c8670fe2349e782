#include "mqt/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "mqt/dynamics.hpp"
#include "mqt/errors.hpp"
#include "mqt/markov_quantile.hpp"
#include "mqt/oracle.hpp"
#include "mqt/process.hpp"

namespace mqt::verify {

bool SuiteReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

std::vector<std::pair<std::string, MarginalCurve>> preset_curves(int levels) {
  return {{"translation", MarginalCurve::translation(levels)},
          {"scaling", MarginalCurve::scaling(levels)},
          {"split_merge", MarginalCurve::split_merge(levels)},
          {"moving_point", MarginalCurve::moving_point(levels)},
          {"constant", MarginalCurve::constant(levels)}};
}

std::vector<std::string> suite_names() {
  return {"energy", "action-equality", "markov", "mq", "oracle", "continuity", "all"};
}

namespace {

constexpr int kLevels = 16;

struct Suite {
  std::vector<Check>& out;

  // Passes when |value - expected| <= tol.
  void near(const std::string& name, double value, double expected, double tol) {
    const double err = std::abs(value - expected);
    std::ostringstream d;
    d.precision(12);
    d << "value " << value << ", expected " << expected;
    out.push_back({name, err <= tol, err, tol, d.str()});
  }
  void truth(const std::string& name, bool ok, const std::string& detail = {}) {
    out.push_back({name, ok, ok ? 1.0 : 0.0, 0.0, detail});
  }
};

double unit(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

// Random partition of [a,b] with `n` interior times, kept away from each other.
TimePartition random_partition(std::mt19937_64& gen, std::size_t n, double a = 0.0, double b = 1.0) {
  for (;;) {
    std::vector<double> ts{a, b};
    for (std::size_t i = 0; i < n; ++i) ts.push_back(a + (b - a) * (0.02 + 0.96 * unit(gen)));
    std::sort(ts.begin(), ts.end());
    bool ok = true;
    for (std::size_t i = 1; i < ts.size(); ++i) ok = ok && ts[i] - ts[i - 1] > 1e-3;
    if (ok) return TimePartition(ts);
  }
}

void energy_suite(Suite& s, std::mt19937_64& gen) {
  const auto tr = MarginalCurve::translation(kLevels);
  for (int d = 0; d <= 8; ++d)
    s.near("translation energy at depth " + std::to_string(d),
           energy_partition(tr, TimePartition::dyadic(0.0, 1.0, d)), 1.0, 1e-12);
  s.near("split_merge energy on {0,1/2,1}",
         energy_partition(MarginalCurve::split_merge(kLevels), TimePartition({0.0, 0.5, 1.0})), 1.0, 1e-12);
  s.near("moving_point refined energy", energy(MarginalCurve::moving_point(kLevels), 1e-7).value, 4.0 / 3.0,
         1e-6);
  const double var = (1.0 - 1.0 / (kLevels * kLevels)) / 12.0;
  s.near("scaling refined energy", energy(MarginalCurve::scaling(kLevels), 1e-12).value, var, 1e-12);
  s.near("constant refined energy", energy(MarginalCurve::constant(kLevels), 1e-12).value, 0.0, 0.0);

  const auto presets = preset_curves(kLevels);
  int violations = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto& c = presets[static_cast<std::size_t>(trial) % presets.size()].second;
    const auto coarse = random_partition(gen, 1 + gen() % 4);
    const auto fine = coarse.with(random_partition(gen, 1 + gen() % 6).interior());
    if (energy_partition(c, coarse) > energy_partition(c, fine) + 1e-9) ++violations;
  }
  s.near("refinement monotonicity violations (20 pairs)", violations, 0, 0);

  violations = 0;
  for (int trial = 0; trial < 5; ++trial) {
    const auto& c = presets[static_cast<std::size_t>(trial) % presets.size()].second;
    auto abc = random_partition(gen, 1, 0.0, 1.0);
    const double a = 0.0, b = abc[1], e = 1.0;
    const double lhs = energy(c, 1e-12, a, b).value + energy(c, 1e-12, b, e).value;
    if (std::abs(lhs - energy(c, 1e-12, a, e).value) > 1e-9) ++violations;
  }
  s.near("Chasles violations (5 triples)", violations, 0, 0);
}

void action_suite(Suite& s, std::mt19937_64& gen) {
  for (const auto& [name, c] : preset_curves(kLevels)) {
    const double e = energy(c, 1e-9).value;
    const TimePartition unit_grid({0.0, 1.0});
    s.near(name + ": action of the quantile process", action(c, quantile_law(c, unit_grid), 1e-8).value, e, 1e-6);
    for (int i = 0; i < 2; ++i) {
      const auto r = random_partition(gen, 1 + gen() % 3);
      s.near(name + ": action of the quantile process made Markov at a random partition",
             action(c, q_markovized(c, r, r), 1e-8).value, e, 1e-6);
    }
    s.near(name + ": action of the Markov-quantile chain", action(c, mq_chain(c, unit_grid), 1e-8).value, e, 1e-6);
  }
}

void markov_suite(Suite& s, std::mt19937_64& gen) {
  for (const auto& [name, c] : preset_curves(kLevels)) {
    for (std::size_t n : {2u, 4u, 8u}) {
      const auto grid = TimePartition::uniform(0.0, 1.0, n);
      const auto ch = mq_chain(c, grid);
      const GridPathLaw expanded(grid, joint_of(ch), Interpolation::quantile_follow);
      s.truth(name + ": Markov-quantile chain is Markov on " + std::to_string(n + 1) + " times",
              is_markov(expanded, 1e-10));
    }
    const auto r = random_partition(gen, 2);
    const auto grid = r.refined(1);
    s.truth(name + ": quantile process made Markov keeps the marginals", [&] {
      const auto l = q_markovized(c, r, grid);
      for (std::size_t i = 0; i < grid.size(); ++i)
        if (!same_atoms(l.marginal(i), c.marginal_at(grid[i]), 1e-12)) return false;
      return true;
    }());
  }
  const TimePartition half({0.0, 0.5, 1.0});
  const auto sm = MarginalCurve::split_merge(kLevels);
  s.truth("split_merge quantile process is not Markov on {0,1/2,1}", !is_markov(quantile_law(sm, half)));
  s.truth("split_merge quantile process made Markov at 1/2 is Markov",
          is_markov(q_markovized(sm, half, half)));
}

void mq_suite(Suite& s, std::mt19937_64& gen) {
  const auto sm = MarginalCurve::split_merge(kLevels);
  {
    const auto p = mq_coupling(sm, 0.0, 1.0);
    double err = 0.0;
    for (double m : p.mass()) err = std::max(err, std::abs(m - 0.25));
    s.near("split_merge Markov-quantile coupling (0,1) is all 1/4", err, 0.0, 1e-9);
  }
  const auto presets = preset_curves(kLevels);
  int bad_incr = 0, bad_lo = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto& c = presets[static_cast<std::size_t>(trial) % presets.size()].second;
    const auto st = random_partition(gen, 2);
    const double a = st[1], b = st[2];
    const auto mq = mq_coupling(c, a, b);
    if (!increasing_kernel(mq, 1e-10)) ++bad_incr;
    const auto p = random_partition(gen, 1 + gen() % 4, a, b);
    if (!lo_leq(quantile_product(c, p), mq, 1e-10)) ++bad_lo;
  }
  s.near("Markov-quantile couplings without increasing kernel (20 draws)", bad_incr, 0, 0);
  s.near("finite products not lo-dominating the limit (20 draws)", bad_lo, 0, 0);

  const auto k1 = kernel_of(mq_coupling(sm, 0.25, 0.5));
  const auto k2 = kernel_of(mq_coupling(sm, 0.5, 0.75));
  const auto direct = mq_coupling(sm, 0.25, 0.75);
  s.near("split_merge semigroup consistency across 1/2",
         joint_cdf_distance(coupling_of(sm.marginal_at(0.25), compose(k1, k2)), direct), 0.0, 1e-9);
  const auto tr = MarginalCurve::translation(kLevels);
  s.near("translation Markov-quantile coupling is the quantile coupling",
         joint_cdf_distance(mq_coupling(tr, 0.0, 1.0), quantile_coupling(tr.marginal_at(0.0), tr.marginal_at(1.0))),
         0.0, 1e-12);
}

void oracle_suite(Suite& s, std::mt19937_64& gen) {
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> x(5), y(5);
    for (auto& v : x) v = 4.0 * unit(gen) - 2.0;
    for (auto& v : y) v = 4.0 * unit(gen) - 2.0;
    const auto mu = AtomicMeasure::uniform(x), nu = AtomicMeasure::uniform(y);
    if (mu.size() != 5 || nu.size() != 5) continue;
    const double w = w2(mu, nu);
    worst = std::max(worst, std::abs(oracle::min_cost_over_permutations(mu, nu).cost - w * w));
  }
  s.near("w2^2 against permutation brute force (20 pairs)", worst, 0.0, 1e-12);

  worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<AtomicMeasure> ms;
    std::vector<std::vector<double>> pos(3);
    std::size_t total = 1;
    for (auto& p : pos) {
      const std::size_t n = 1 + gen() % 4;
      for (std::size_t i = 0; i < n; ++i) p.push_back(static_cast<double>(i) + 0.1 * static_cast<double>(gen() % 5));
      total *= n;
    }
    std::vector<double> tensor(total);
    double sum = 0.0;
    for (auto& v : tensor) sum += v = unit(gen) < 0.3 ? 0.0 : unit(gen);
    if (sum == 0.0) continue;
    for (auto& v : tensor) v /= sum;
    // Marginals come from the tensor; atoms without mass would be invalid.
    const auto law = JointLaw::from_dense(
        [&] {
          std::vector<AtomicMeasure> full;
          for (std::size_t t = 0; t < 3; ++t) full.push_back(AtomicMeasure::uniform(pos[t]));
          return full;
        }(),
        tensor);
    const GridPathLaw l(TimePartition({0.0, 0.5, 1.0}), law, Interpolation::quantile_follow);
    const std::vector<double> mid{0.5};
    const auto got = joint_of(make_markov_at(l, mid)).to_dense();
    const auto want = oracle::markovize_middle(law.marginals(), law.to_dense());
    for (std::size_t i = 0; i < got.size(); ++i) worst = std::max(worst, std::abs(got[i] - want[i]));
  }
  s.near("Markovization against the direct three-time formula (10 tensors)", worst, 0.0, 1e-12);

  const auto sm = MarginalCurve::split_merge(kLevels);
  const oracle::EnumeratedChainFamily fam(sm, TimePartition({0.0, 0.5, 1.0}), 4);
  s.truth("split_merge minimality probe, mesh 1/4", oracle::sto_min_probe(sm, fam, 0.0, 1.0, -0.5));

  const auto two = MarginalCurve::constant(kLevels, AtomicMeasure({0.0, 1.0}, {0.5, 0.5}));
  const oracle::EnumeratedChainFamily cfam(two, TimePartition({0.0, 0.5, 1.0}), 2);
  const auto indep = GridPathLaw(
      cfam.grid(),
      ChainLaw(cfam.marginals()[0], {kernel_of(Coupling::independent(cfam.marginals()[0], cfam.marginals()[1])),
                                     kernel_of(Coupling::independent(cfam.marginals()[1], cfam.marginals()[2]))}),
      Interpolation::quantile_follow);
  s.truth("planted non-minimal chain is detected", !oracle::sto_min_probe(indep, cfam, 0.0, 1.0, 0.0).minimal);
}

void continuity_suite(Suite& s, std::mt19937_64& gen) {
  constexpr std::size_t steps = 1000;
  for (const char* name : {"translation", "moving_point"}) {
    const auto c = std::string(name) == "translation" ? MarginalCurve::translation(64)
                                                     : MarginalCurve::moving_point(64);
    const auto v = velocity_field(c, 1e-4);
    double worst = 0.0;
    auto lib = test_function_library();
    lib.push_back(random_test_function(gen()));
    for (const auto& phi : lib) worst = std::max(worst, std::abs(continuity_residual(c, v, phi, steps)));
    s.near(std::string(name) + ": minimal-field residual", worst, 0.0, 1e-3);
    const double ke = kinetic_energy(c, v, steps);
    s.truth(std::string(name) + ": kinetic energy at least the energy", ke >= energy(c, 1e-8).value - 1e-6,
            "kinetic " + std::to_string(ke));
  }
  const auto tr = MarginalCurve::translation(64);
  const TestFunction phi{{0.0, 1.0, 0.0, 0.0}, 0.1, 0.9};
  const double wrong = continuity_residual_with(tr, [](double, double) { return 0.0; }, phi, steps);
  s.truth("translation: zero field leaves a residual of at least 0.1", std::abs(wrong) >= 0.1,
          "residual " + std::to_string(wrong));
}

}  // namespace

SuiteReport run_suite(const std::string& name, std::uint64_t seed) {
  const auto names = suite_names();
  if (std::find(names.begin(), names.end(), name) == names.end())
    throw PreconditionError("unknown suite '" + name + "'");
  SuiteReport rep{name, {}};
  Suite s{rep.checks};
  std::mt19937_64 gen(seed);
  const bool all = name == "all";
  if (all || name == "energy") energy_suite(s, gen);
  if (all || name == "action-equality") action_suite(s, gen);
  if (all || name == "markov") markov_suite(s, gen);
  if (all || name == "mq") mq_suite(s, gen);
  if (all || name == "oracle") oracle_suite(s, gen);
  if (all || name == "continuity") continuity_suite(s, gen);
  return rep;
}

nlohmann::json to_json(const SuiteReport& report) {
  nlohmann::json checks = nlohmann::json::array();
  std::size_t failed = 0;
  for (const auto& c : report.checks) {
    failed += !c.passed;
    checks.push_back({{"name", c.name},
                      {"passed", c.passed},
                      {"value", c.value},
                      {"tolerance", c.tolerance},
                      {"detail", c.detail}});
  }
  return {{"suite", report.suite},
          {"passed", report.passed()},
          {"total", report.checks.size()},
          {"failed", failed},
          {"checks", checks}};
}

}  // namespace mqt::verify
