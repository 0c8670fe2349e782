// Times the serial reference kernels against their OpenMP versions.
//
//   bench_kernels [size] [repeats]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <string>
#include <vector>

#include "mqt/curve.hpp"
#include "mqt/kernels.hpp"
#include "mqt/measure.hpp"
#include "mqt/coupling.hpp"

namespace {

template <class F>
double best_ms(int repeats, F&& f) {
  double best = INFINITY;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

void row(const char* name, double serial, double omp, double diff) {
  std::printf("%-28s %10.3f %10.3f %8.2fx   max|diff| %.2e\n", name, serial, omp, serial / omp, diff);
}

volatile double sink = 0.0;

}  // namespace

int main(int argc, char** argv) {
  namespace k = mqt::kernels;
  const std::size_t n = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 1500;
  const int repeats = argc > 2 ? std::atoi(argv[2]) : 5;

  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> x(n), y(n), z(n);
  for (auto& v : x) v = unif(gen);
  for (auto& v : y) v = 2.0 * unif(gen);
  for (auto& v : z) v = 3.0 * unif(gen);
  const auto mu = mqt::AtomicMeasure::uniform(x);
  const auto nu = mqt::AtomicMeasure::uniform(y);
  const auto rho = mqt::AtomicMeasure::uniform(z);
  // Dense plans so the product is not dominated by sparsity.
  const auto p = mqt::Coupling::independent(mu, nu);
  const auto q = mqt::quantile_coupling(nu, rho);
  const std::vector<double> mid(nu.masses().begin(), nu.masses().end());

  std::printf("threads %d, atoms %zu, best of %d (ms)\n", k::thread_count(), n, repeats);
  std::printf("%-28s %10s %10s %9s\n", "kernel", "serial", "omp", "speedup");

  std::vector<double> a, b;
  const double ts = best_ms(repeats, [&] { a = k::serial::compose(p.mass(), mu.size(), nu.size(), q.mass(), rho.size(), mid); });
  const double to = best_ms(repeats, [&] { b = k::omp::compose(p.mass(), mu.size(), nu.size(), q.mass(), rho.size(), mid); });
  row("compose (dense . quantile)", ts, to, k::serial::max_abs_diff(a, b));

  const double cs = best_ms(repeats, [&] { a = k::serial::joint_cdf(p.mass(), mu.size(), nu.size()); });
  const double co = best_ms(repeats, [&] { b = k::omp::joint_cdf(p.mass(), mu.size(), nu.size()); });
  row("joint_cdf", cs, co, k::serial::max_abs_diff(a, b));

  const double ds = best_ms(repeats, [&] { sink = k::serial::max_abs_diff(p.mass(), a); });
  const double dO = best_ms(repeats, [&] { sink = k::omp::max_abs_diff(p.mass(), a); });
  row("max_abs_diff", ds, dO, 0.0);

  // Energy-style reduction: one W2 per dyadic interval.
  const auto curve = mqt::MarginalCurve::scaling(256);
  const auto grid = mqt::TimePartition::dyadic(0.0, 1.0, 11);
  auto term = [&](std::size_t i) {
    const double d = mqt::w2(curve.marginal_at(grid[i]), curve.marginal_at(grid[i + 1]));
    return d * d / (grid[i + 1] - grid[i]);
  };
  double rs = 0.0, ro = 0.0;
  const double es = best_ms(repeats, [&] { rs = k::serial::reduce_sum(grid.intervals(), term); });
  const double eo = best_ms(repeats, [&] { ro = k::omp::reduce_sum(grid.intervals(), term); });
  row("reduce_sum (energy, 2^11)", es, eo, std::abs(rs - ro));
  return 0;
}
