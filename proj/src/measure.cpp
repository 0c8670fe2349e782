#include "mqt/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mqt/coupling.hpp"
#include "mqt/errors.hpp"

namespace mqt {

AtomicMeasure::AtomicMeasure(std::vector<double> positions, std::vector<double> masses) {
  if (positions.empty()) throw PreconditionError("atomic measure needs at least one atom");
  if (positions.size() != masses.size())
    throw PreconditionError("positions and masses differ in length");
  for (std::size_t i = 0; i < positions.size(); ++i) {
    if (!std::isfinite(positions[i]) || !std::isfinite(masses[i]))
      throw PreconditionError("non-finite atom");
  }

  std::vector<std::size_t> order(positions.size());
  std::iota(order.begin(), order.end(), 0);
  if (!std::is_sorted(positions.begin(), positions.end())) {
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return positions[a] < positions[b]; });
  }
  for (std::size_t idx : order) {
    const double x = positions[idx] + 0.0;  // folds -0.0 into +0.0
    if (!positions_.empty() && positions_.back() == x) {
      masses_.back() += masses[idx];
    } else {
      positions_.push_back(x);
      masses_.push_back(masses[idx]);
    }
  }
  for (double m : masses_) {
    if (m < kMinMass) throw PreconditionError("atom mass " + std::to_string(m) + " below minimum");
  }
  finish();
  if (std::abs(cumulative_.back() - 1.0) > kMassTol)
    throw PreconditionError("masses sum to " + std::to_string(cumulative_.back()) + ", not 1");
}

void AtomicMeasure::finish() {
  cumulative_.resize(masses_.size());
  std::partial_sum(masses_.begin(), masses_.end(), cumulative_.begin());
}

AtomicMeasure AtomicMeasure::dirac(double x) { return AtomicMeasure({x}, {1.0}); }

AtomicMeasure AtomicMeasure::uniform(std::span<const double> positions) {
  const double m = 1.0 / static_cast<double>(positions.size());
  return AtomicMeasure(std::vector<double>(positions.begin(), positions.end()),
                       std::vector<double>(positions.size(), m));
}

AtomicMeasure AtomicMeasure::from_weights(std::span<const double> positions,
                                          std::span<const double> weights) {
  if (positions.size() != weights.size())
    throw PreconditionError("positions and weights differ in length");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw PreconditionError("negative weight");
    total += w;
  }
  if (!(total > 0.0)) throw PreconditionError("weights sum to zero");
  std::vector<double> xs, ms;
  double kept = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] / total >= kMinMass) {
      xs.push_back(positions[i]);
      ms.push_back(weights[i]);
      kept += weights[i];
    }
  }
  for (double& m : ms) m /= kept;
  return AtomicMeasure(std::move(xs), std::move(ms));
}

std::size_t AtomicMeasure::find(double x) const {
  auto it = std::lower_bound(positions_.begin(), positions_.end(), x);
  if (it != positions_.end() && *it == x) return static_cast<std::size_t>(it - positions_.begin());
  return size();
}

double AtomicMeasure::mean() const {
  double s = 0.0;
  for (std::size_t i = 0; i < size(); ++i) s += positions_[i] * masses_[i];
  return s;
}

QuantileFunction::QuantileFunction(const AtomicMeasure& mu)
    : breaks_(mu.cumulative().begin(), mu.cumulative().end()),
      values_(mu.positions().begin(), mu.positions().end()) {}

double QuantileFunction::operator()(double alpha) const {
  // First break with F_i >= alpha; the last value covers rounding above F_n.
  auto it = std::lower_bound(breaks_.begin(), breaks_.end(), alpha);
  if (it == breaks_.end()) return values_.back();
  return values_[static_cast<std::size_t>(it - breaks_.begin())];
}

double quantile(const AtomicMeasure& mu, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw DomainError("quantile level must lie in (0,1), got " + std::to_string(alpha));
  return QuantileFunction(mu)(alpha);
}

double cdf(const AtomicMeasure& mu, double x) {
  auto pos = mu.positions();
  auto it = std::upper_bound(pos.begin(), pos.end(), x);
  if (it == pos.begin()) return 0.0;
  return mu.cumulative(static_cast<std::size_t>(it - pos.begin()) - 1);
}

double cdf_left(const AtomicMeasure& mu, double x) {
  auto pos = mu.positions();
  auto it = std::lower_bound(pos.begin(), pos.end(), x);
  if (it == pos.begin()) return 0.0;
  return mu.cumulative(static_cast<std::size_t>(it - pos.begin()) - 1);
}

namespace {

// Calls f(F_mu(x), F_nu(x)) at every atom x of either measure, in increasing
// order. Both CDFs are step functions, so these points carry every value.
template <class F>
void walk_merged(const AtomicMeasure& mu, const AtomicMeasure& nu, F&& f) {
  std::size_t i = 0, j = 0;
  double fm = 0.0, fn = 0.0;
  while (i < mu.size() || j < nu.size()) {
    double x;
    if (j >= nu.size() || (i < mu.size() && mu.position(i) < nu.position(j))) {
      x = mu.position(i);
    } else {
      x = nu.position(j);
    }
    while (i < mu.size() && mu.position(i) == x) fm = mu.cumulative(i++);
    while (j < nu.size() && nu.position(j) == x) fn = nu.cumulative(j++);
    f(fm, fn);
  }
}

}  // namespace

bool sto_leq(const AtomicMeasure& mu, const AtomicMeasure& nu, double tol) {
  bool ok = true;
  walk_merged(mu, nu, [&](double fm, double fn) {
    if (fm < fn - tol) ok = false;
  });
  return ok;
}

double cdf_distance(const AtomicMeasure& mu, const AtomicMeasure& nu) {
  double d = 0.0;
  walk_merged(mu, nu, [&](double fm, double fn) { d = std::max(d, std::abs(fm - fn)); });
  return d;
}

bool approx_equal(const AtomicMeasure& mu, const AtomicMeasure& nu, double tol) {
  return cdf_distance(mu, nu) <= tol;
}

bool same_atoms(const AtomicMeasure& mu, const AtomicMeasure& nu, double tol) {
  if (mu.size() != nu.size()) return false;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (std::abs(mu.position(i) - nu.position(i)) > tol * (1.0 + std::abs(mu.position(i))))
      return false;
    if (std::abs(mu.mass(i) - nu.mass(i)) > tol) return false;
  }
  return true;
}

namespace {

// Walks the merged cumulative-mass partition of two measures, calling
// f(i, j, overlap) for every pair of atoms whose level intervals overlap.
// The final break of both sides is treated as exactly 1.
template <class F>
void walk_levels(const AtomicMeasure& mu, const AtomicMeasure& nu, F&& f) {
  const std::size_t n = mu.size(), m = nu.size();
  std::size_t i = 0, j = 0;
  double level = 0.0;
  while (i < n && j < m) {
    const double fi = (i + 1 == n) ? 1.0 : mu.cumulative(i);
    const double gj = (j + 1 == m) ? 1.0 : nu.cumulative(j);
    const double upper = std::min(fi, gj);
    const double overlap = upper - level;
    if (overlap > 0.0) f(i, j, overlap);
    level = std::max(level, upper);
    if (fi <= gj) ++i;
    if (gj <= fi) ++j;
  }
}

}  // namespace

double w2(const AtomicMeasure& mu, const AtomicMeasure& nu) {
  double s = 0.0;
  walk_levels(mu, nu, [&](std::size_t i, std::size_t j, double w) {
    const double d = nu.position(j) - mu.position(i);
    s += w * d * d;
  });
  return std::sqrt(s);
}

Coupling quantile_coupling(const AtomicMeasure& mu, const AtomicMeasure& nu) {
  std::vector<double> mass(mu.size() * nu.size(), 0.0);
  walk_levels(mu, nu, [&](std::size_t i, std::size_t j, double w) { mass[i * nu.size() + j] += w; });
  return Coupling(mu, nu, std::move(mass));
}

}  // namespace mqt
