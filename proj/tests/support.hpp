#pragma once

// Hand-rolled generators for the property tests. Every generator takes the
// Rng explicitly so a failing case can be replayed from its seed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "mqt/coupling.hpp"
#include "mqt/curve.hpp"
#include "mqt/measure.hpp"

namespace testing {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * unit(); }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(gen_() % n); }
  int between(int lo, int hi) { return lo + static_cast<int>(index(static_cast<std::size_t>(hi - lo + 1))); }
  bool coin(double p = 0.5) { return unit() < p; }
  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

// Positions on a coarse lattice so that ties between measures occur.
inline mqt::AtomicMeasure random_measure(Rng& rng, int max_atoms = 6, bool lattice = true) {
  const int n = rng.between(1, max_atoms);
  std::vector<double> x(static_cast<std::size_t>(n)), w(static_cast<std::size_t>(n));
  for (auto& v : x) v = lattice ? 0.5 * rng.between(-6, 6) : rng.uniform(-3.0, 3.0);
  for (auto& v : w) v = 0.05 + rng.unit();
  return mqt::AtomicMeasure::from_weights(x, w);
}

inline mqt::AtomicMeasure random_uniform_measure(Rng& rng, std::size_t n) {
  for (;;) {
    std::vector<double> x(n);
    for (auto& v : x) v = rng.uniform(-2.0, 2.0);
    auto mu = mqt::AtomicMeasure::uniform(x);
    if (mu.size() == n) return mu;
  }
}

// Mixture of the comonotone, independent and countermonotone plans.
inline mqt::Coupling random_plan(Rng& rng, const mqt::AtomicMeasure& mu, const mqt::AtomicMeasure& nu) {
  const auto q = mqt::quantile_coupling(mu, nu);
  const auto ind = mqt::Coupling::independent(mu, nu);
  // Countermonotone: comonotone plan against the reflected target.
  std::vector<double> neg(nu.size()), negm(nu.size());
  for (std::size_t j = 0; j < nu.size(); ++j) {
    neg[j] = -nu.position(nu.size() - 1 - j);
    negm[j] = nu.mass(nu.size() - 1 - j);
  }
  const auto anti = mqt::quantile_coupling(mu, mqt::AtomicMeasure(neg, negm));
  double a = rng.unit(), b = rng.unit(), c = rng.unit();
  const double s = a + b + c;
  a /= s, b /= s, c /= s;
  std::vector<double> m(mu.size() * nu.size());
  for (std::size_t i = 0; i < mu.size(); ++i)
    for (std::size_t j = 0; j < nu.size(); ++j)
      m[i * nu.size() + j] = a * q(i, j) + b * ind(i, j) + c * anti(i, nu.size() - 1 - j);
  return mqt::Coupling(mu, nu, std::move(m));
}

// Plans with increasing kernel: comonotone and independent mixtures.
inline mqt::Coupling random_increasing_plan(Rng& rng, const mqt::AtomicMeasure& mu, const mqt::AtomicMeasure& nu) {
  const auto q = mqt::quantile_coupling(mu, nu);
  const auto ind = mqt::Coupling::independent(mu, nu);
  const double a = rng.unit();
  std::vector<double> m(mu.size() * nu.size());
  for (std::size_t k = 0; k < m.size(); ++k) m[k] = a * q.mass()[k] + (1.0 - a) * ind.mass()[k];
  return mqt::Coupling(mu, nu, std::move(m));
}

inline mqt::TimePartition random_partition(Rng& rng, std::size_t interior, double a = 0.0, double b = 1.0) {
  for (;;) {
    std::vector<double> ts{a, b};
    for (std::size_t i = 0; i < interior; ++i) ts.push_back(rng.uniform(a, b));
    std::sort(ts.begin(), ts.end());
    bool ok = true;
    for (std::size_t i = 1; i < ts.size(); ++i) ok = ok && ts[i] - ts[i - 1] > 1e-4;
    if (ok) return mqt::TimePartition(ts);
  }
}

// Grid curve with a few nodes in time and monotone rows; nodes may make
// atoms merge (equal neighbouring values).
inline mqt::MarginalCurve random_grid_curve(Rng& rng, int levels = 8) {
  std::vector<double> times{0.0};
  const int nodes = rng.between(0, 3);
  for (int i = 0; i < nodes; ++i) times.push_back(rng.uniform(0.05, 0.95));
  times.push_back(1.0);
  std::sort(times.begin(), times.end());
  const int n_alpha = rng.between(1, 4);
  std::vector<double> alpha;
  for (int j = 1; j <= n_alpha; ++j) alpha.push_back(static_cast<double>(j) / n_alpha);
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < times.size(); ++i) {
    std::vector<double> row;
    double x = rng.uniform(-1.0, 0.0);
    for (int j = 0; j < n_alpha; ++j) {
      row.push_back(x);
      x += rng.coin(0.3) ? 0.0 : rng.uniform(0.1, 0.8);
    }
    rows.push_back(row);
  }
  return mqt::MarginalCurve::grid(times, alpha, rows, levels);
}

inline std::vector<mqt::MarginalCurve> presets(int levels) {
  return {mqt::MarginalCurve::translation(levels), mqt::MarginalCurve::scaling(levels),
          mqt::MarginalCurve::split_merge(levels), mqt::MarginalCurve::moving_point(levels),
          mqt::MarginalCurve::constant(levels)};
}

}  // namespace testing
