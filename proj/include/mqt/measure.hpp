#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mqt {

class Coupling;

// Absolute tolerance on total mass and on marginal sums.
inline constexpr double kMassTol = 1e-12;
// Masses below this are rejected by the constructor.
inline constexpr double kMinMass = 1e-15;
// Equality of measures and couplings: CDF sup-distance at most this.
inline constexpr double kEqualTol = 1e-12;

/// Finitely supported probability measure on the real line.
///
/// Atoms are kept sorted with strictly increasing positions and strictly
/// positive masses summing to one. Values are immutable after construction.
class AtomicMeasure {
 public:
  /// Sorts the atoms and merges duplicate positions by summing their masses.
  /// Throws PreconditionError on empty input, size mismatch, non-finite
  /// values, a mass below kMinMass, or a total mass off by more than kMassTol.
  AtomicMeasure(std::vector<double> positions, std::vector<double> masses);

  static AtomicMeasure dirac(double x);
  /// Equal masses on the given positions (duplicates merged).
  static AtomicMeasure uniform(std::span<const double> positions);
  /// Builds a measure from nonnegative weights: entries below kMinMass
  /// relative to the total are dropped and the rest normalized.
  static AtomicMeasure from_weights(std::span<const double> positions,
                                    std::span<const double> weights);

  std::size_t size() const { return positions_.size(); }
  std::span<const double> positions() const { return positions_; }
  std::span<const double> masses() const { return masses_; }
  double position(std::size_t i) const { return positions_[i]; }
  double mass(std::size_t i) const { return masses_[i]; }
  /// F_i = mass of atoms 0..i.
  double cumulative(std::size_t i) const { return cumulative_[i]; }
  std::span<const double> cumulative() const { return cumulative_; }

  /// Index of the atom at exactly `x`, or size() when there is none.
  std::size_t find(double x) const;

  double mean() const;

 private:
  AtomicMeasure() = default;
  void finish();

  std::vector<double> positions_;
  std::vector<double> masses_;
  std::vector<double> cumulative_;
};

/// Left-continuous quantile step function of an atomic measure: value
/// `values[i]` on the level interval (breaks[i-1], breaks[i]].
class QuantileFunction {
 public:
  explicit QuantileFunction(const AtomicMeasure& mu);

  double operator()(double alpha) const;
  std::span<const double> breaks() const { return breaks_; }
  std::span<const double> values() const { return values_; }

 private:
  std::vector<double> breaks_;
  std::vector<double> values_;
};

/// Smallest x with mu(]-inf,x]) >= alpha and mu([x,+inf[) >= 1 - alpha.
/// Throws DomainError unless 0 < alpha < 1.
double quantile(const AtomicMeasure& mu, double alpha);

/// Right-continuous cumulative mass mu(]-inf, x]).
double cdf(const AtomicMeasure& mu, double x);

/// Mass strictly left of x, i.e. mu(]-inf, x[).
double cdf_left(const AtomicMeasure& mu, double x);

/// Stochastic order: cdf(mu, x) >= cdf(nu, x) - tol for every x.
bool sto_leq(const AtomicMeasure& mu, const AtomicMeasure& nu, double tol = kEqualTol);

/// Sup-distance between the two CDFs.
double cdf_distance(const AtomicMeasure& mu, const AtomicMeasure& nu);

bool approx_equal(const AtomicMeasure& mu, const AtomicMeasure& nu, double tol = kEqualTol);

/// Same atoms (positions within `tol`) carrying the same masses (within
/// `tol`). Stricter than approx_equal; used for marginal-compatibility checks.
bool same_atoms(const AtomicMeasure& mu, const AtomicMeasure& nu, double tol = kMassTol);

/// Exact 2-Wasserstein distance: L2 distance of the quantile functions over
/// the merged cumulative-mass partition.
double w2(const AtomicMeasure& mu, const AtomicMeasure& nu);

/// The comonotone (north-west corner) coupling. Entry (i,j) carries the
/// overlap of the cumulative intervals ]F_{i-1}, F_i] and ]G_{j-1}, G_j].
Coupling quantile_coupling(const AtomicMeasure& mu, const AtomicMeasure& nu);

}  // namespace mqt
