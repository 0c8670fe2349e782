#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "mqt/measure.hpp"

namespace mqt {

/// Sorted times r_0 = a < r_1 < ... < r_{m+1} = b inside [0,1].
class TimePartition {
 public:
  /// Throws PreconditionError unless the times are strictly increasing, at
  /// least two, and inside [0,1].
  explicit TimePartition(std::vector<double> times);

  /// Nested dyadic partition of [a,b] into 2^depth pieces, with every
  /// `forced` time strictly inside (a,b) added.
  static TimePartition dyadic(double a, double b, int depth, std::span<const double> forced = {});
  static TimePartition uniform(double a, double b, std::size_t intervals);
  /// Parses "0,0.5,1".
  static TimePartition parse(const std::string& text);

  std::size_t size() const { return times_.size(); }
  std::size_t intervals() const { return times_.size() - 1; }
  double operator[](std::size_t i) const { return times_[i]; }
  double front() const { return times_.front(); }
  double back() const { return times_.back(); }
  std::span<const double> times() const { return times_; }
  std::vector<double> interior() const;
  double mesh() const;

  /// Index of the time within `tol` of t, or size() if absent.
  std::size_t index_of(double t, double tol = 1e-12) const;
  bool contains(double t, double tol = 1e-12) const { return index_of(t, tol) < size(); }
  bool contains_all(std::span<const double> ts, double tol = 1e-12) const;

  /// Splits every interval into 2^depth equal pieces and adds `forced` times.
  TimePartition refined(int depth, std::span<const double> forced = {}) const;
  /// Union with extra times inside [front, back].
  TimePartition with(std::span<const double> extra) const;

 private:
  std::vector<double> times_;
};

enum class CurveKind { translation, scaling, split_merge, moving_point, constant, grid };

std::string to_string(CurveKind kind);

/// Curve t -> mu_t encoded by a quantile surface G(t, alpha), nondecreasing
/// in alpha. The marginal at t is the K-point quantization that puts mass 1/K
/// at G(t, (k - 1/2)/K).
class MarginalCurve {
 public:
  /// G = alpha + velocity * t.
  static MarginalCurve translation(int levels, double velocity = 1.0);
  /// G = (1 + rate * t)(alpha - 1/2).
  static MarginalCurve scaling(int levels, double rate = 1.0);
  /// G = -|t - 1/2| for alpha <= 1/2 and +|t - 1/2| above: two half-mass
  /// atoms merging at t = 1/2 and splitting again.
  static MarginalCurve split_merge(int levels);
  /// G = t^2 for every alpha.
  static MarginalCurve moving_point(int levels);
  /// G(t, .) is the quantile function of `mu` for every t.
  static MarginalCurve constant(int levels, const AtomicMeasure& mu);
  /// G(t, .) = alpha for every t.
  static MarginalCurve constant(int levels);
  /// Quantile values on a (time, level) grid: linear in t between `times`,
  /// left-continuous steps in alpha between `alpha_levels`. A repeated time
  /// encodes a jump; at the jump time itself the later row applies.
  static MarginalCurve grid(std::vector<double> times, std::vector<double> alpha_levels,
                            std::vector<std::vector<double>> values, int levels);

  CurveKind kind() const;
  int level_count() const;
  /// Atom-critical times, sorted, strictly inside (0,1).
  std::span<const double> special_times() const;

  MarginalCurve with_levels(int levels) const;
  MarginalCurve with_special_times(std::span<const double> extra) const;
  /// Replaces the special times, including those a preset or grid declares.
  MarginalCurve with_only_special_times(std::span<const double> times) const;

  /// G(t, alpha) for t in [0,1], alpha in (0,1].
  double quantile(double t, double alpha) const;
  /// Quantized level (k - 1/2)/K, k = 1..K.
  double level(int k) const;
  /// G(t, level(k)) for k = 1..K; nondecreasing.
  std::vector<double> level_values(double t) const;
  /// Throws DomainError unless t lies in [0,1].
  AtomicMeasure marginal_at(double t) const;

 private:
  struct Impl;
  explicit MarginalCurve(std::shared_ptr<const Impl> impl);
  MarginalCurve with_only_special_times(std::vector<double> base, std::span<const double> extra) const;
  std::shared_ptr<const Impl> impl_;
};

/// Outcome of a refinement-to-convergence computation.
struct RefinementReport {
  double value = 0.0;
  int depth = 0;
  bool converged = false;
  /// (depth, value) for every evaluated depth.
  std::vector<std::pair<int, double>> trace;
};

struct RefinementOptions {
  int min_depth = 3;
  /// Largest admissible number of dyadic pieces (2^16).
  std::size_t max_intervals = std::size_t{1} << 16;
};

/// Sum of W2(mu_{r_k}, mu_{r_{k+1}})^2 / (r_{k+1} - r_k).
double energy_partition(const MarginalCurve& c, const TimePartition& r);
/// Sum of W2(mu_{r_k}, mu_{r_{k+1}}).
double length_partition(const MarginalCurve& c, const TimePartition& r);

/// energy_partition over nested dyadic partitions of [a,b] (special times
/// forced in) until two successive values differ by less than `tol`. A
/// report with converged == false means the cap was reached first.
RefinementReport energy(const MarginalCurve& c, double tol, double a = 0.0, double b = 1.0,
                        const RefinementOptions& opts = {});
RefinementReport length(const MarginalCurve& c, double tol, double a = 0.0, double b = 1.0,
                        const RefinementOptions& opts = {});

}  // namespace mqt
