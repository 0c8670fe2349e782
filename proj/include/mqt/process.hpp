#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "mqt/coupling.hpp"
#include "mqt/curve.hpp"
#include "mqt/measure.hpp"

namespace mqt {

/// Largest number of stored paths (nonzero tensor entries) for exact joint laws.
inline constexpr std::size_t kOracleCap = 1'000'000;

/// Joint law of a process on a finite grid, stored sparsely as weighted
/// paths of atom indices into the per-time marginals. Paths are unique and
/// kept in lexicographic order.
class JointLaw {
 public:
  /// `positions[t]` lists candidate atom positions at time index t and
  /// `states` holds n_paths x n_times indices into them. Duplicate paths are
  /// merged, zero-mass paths dropped and unused atoms removed.
  static JointLaw from_paths(const std::vector<std::vector<double>>& positions,
                             std::span<const std::uint32_t> states, std::span<const double> masses);
  /// Dense row-major tensor over the product of the marginal supports.
  static JointLaw from_dense(const std::vector<AtomicMeasure>& marginals,
                             std::span<const double> tensor);

  std::size_t n_times() const { return marginals_.size(); }
  std::size_t n_paths() const { return masses_.size(); }
  const AtomicMeasure& marginal(std::size_t t) const { return marginals_[t]; }
  const std::vector<AtomicMeasure>& marginals() const { return marginals_; }
  std::span<const std::uint32_t> path(std::size_t p) const {
    return std::span<const std::uint32_t>(states_).subspan(p * n_times(), n_times());
  }
  double mass(std::size_t p) const { return masses_[p]; }
  double position(std::size_t p, std::size_t t) const { return marginals_[t].position(path(p)[t]); }

  /// Law of the coordinates first..last (inclusive).
  JointLaw restrict_to(std::size_t first, std::size_t last) const;
  Coupling two_time(std::size_t i, std::size_t j) const;
  /// Dense tensor; throws ResourceError if the product of support sizes
  /// exceeds `cap`.
  std::vector<double> to_dense(std::size_t cap = kOracleCap) const;

 private:
  std::vector<AtomicMeasure> marginals_;
  std::vector<std::uint32_t> states_;
  std::vector<double> masses_;
};

/// Largest difference of path masses (missing paths count as zero mass).
double max_mass_difference(const JointLaw& a, const JointLaw& b);

/// Markov chain on a grid: initial law and one kernel per consecutive pair.
class ChainLaw {
 public:
  /// Kernel k must be defined on the support of the time-k marginal.
  ChainLaw(AtomicMeasure initial, std::vector<Kernel> transitions);

  std::size_t n_times() const { return marginals_.size(); }
  const AtomicMeasure& marginal(std::size_t t) const { return marginals_[t]; }
  const Kernel& transition(std::size_t k) const { return transitions_[k]; }
  std::span<const Kernel> transitions() const { return transitions_; }
  /// Coupling between grid indices i < j.
  Coupling two_time(std::size_t i, std::size_t j) const;

 private:
  std::vector<AtomicMeasure> marginals_;
  std::vector<Kernel> transitions_;
};

/// How a continuous-time path is reconstructed between grid times.
enum class Interpolation { quantile_follow, linear };

/// Recipe that rebuilds a law on a finer grid. Laws built from a curve record
/// how they were built so that refined functionals can rebuild them.
struct LawOrigin {
  enum class Kind { unspecified, quantile, markov_quantile, displacement };
  Kind kind = Kind::unspecified;
  /// Times where a quantile law was made Markov.
  std::vector<double> markov_times;
  double cdf_tol = 1e-9;
  int max_depth = 12;
};

/// Law of a process on a finite time grid, either as an explicit joint law
/// or as a Markov chain.
class GridPathLaw {
 public:
  GridPathLaw(TimePartition grid, JointLaw joint, Interpolation interp, LawOrigin origin = {});
  GridPathLaw(TimePartition grid, ChainLaw chain, Interpolation interp, LawOrigin origin = {});

  const TimePartition& grid() const { return grid_; }
  bool is_chain() const { return std::holds_alternative<ChainLaw>(form_); }
  const JointLaw& joint() const;
  const ChainLaw& chain() const;
  Interpolation interpolation() const { return interp_; }
  const LawOrigin& origin() const { return origin_; }

  const AtomicMeasure& marginal(std::size_t t) const;
  Coupling two_time(std::size_t i, std::size_t j) const;

 private:
  TimePartition grid_;
  std::variant<JointLaw, ChainLaw> form_;
  Interpolation interp_;
  LawOrigin origin_;
};

/// Joint law of `l`; chains are expanded by iterated concatenation. Throws
/// ResourceError when more than `cap` paths would be stored.
JointLaw joint_of(const GridPathLaw& l, std::size_t cap = kOracleCap);

/// `l` made Markov at the interior grid times `r`: past and future become
/// conditionally independent given the state at each time of `r`, segment
/// laws between consecutive times of `r` are kept. Throws PreconditionError
/// if a time of `r` is not an interior grid time.
GridPathLaw make_markov_at(const GridPathLaw& l, std::span<const double> r,
                           std::size_t cap = kOracleCap);

/// Markov on the grid: splitting at each single interior time leaves the
/// joint law unchanged within `tol`.
bool is_markov(const GridPathLaw& l, double tol = kEqualTol, std::size_t cap = kOracleCap);

}  // namespace mqt
