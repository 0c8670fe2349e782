#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mqt/measure.hpp"

namespace mqt {

/// Transport plan between two atomic measures, stored as a dense row-major
/// mass matrix indexed (source atom, target atom).
class Coupling {
 public:
  /// Validates nonnegativity and both marginals within kMassTol.
  Coupling(AtomicMeasure source, AtomicMeasure target, std::vector<double> mass);

  static Coupling identity(const AtomicMeasure& mu);
  static Coupling independent(const AtomicMeasure& mu, const AtomicMeasure& nu);

  /// Collects (x, y, mass) triples into a coupling. Positions closer than
  /// `merge_tol * (1 + |x|)` are identified; masses are renormalized.
  struct Entry {
    double x;
    double y;
    double mass;
  };
  static Coupling from_entries(std::span<const Entry> entries, double merge_tol = 1e-12);

  const AtomicMeasure& source() const { return source_; }
  const AtomicMeasure& target() const { return target_; }
  std::size_t rows() const { return source_.size(); }
  std::size_t cols() const { return target_.size(); }
  double operator()(std::size_t i, std::size_t j) const { return mass_[i * cols() + j]; }
  std::span<const double> mass() const { return mass_; }

  /// Sum of mass(i,j) * (y_j - x_i)^2.
  double cost() const;
  /// Two-dimensional CDF on the product atom grid, row-major.
  std::vector<double> joint_cdf() const;

 private:
  AtomicMeasure source_;
  AtomicMeasure target_;
  std::vector<double> mass_;
};

/// Disintegration of a coupling with respect to its first marginal, stored
/// as a row-stochastic matrix over the target support. Only source atoms are
/// represented; there are no rows off the support.
class Kernel {
 public:
  Kernel(std::vector<double> source_positions, AtomicMeasure target_support,
         std::vector<double> rows);

  std::size_t size() const { return source_positions_.size(); }
  std::span<const double> source_positions() const { return source_positions_; }
  /// The target marginal of the coupling the kernel was taken from; only its
  /// positions matter for the kernel itself.
  const AtomicMeasure& target_support() const { return target_; }
  double operator()(std::size_t i, std::size_t k) const { return rows_[i * target_.size() + k]; }
  std::span<const double> matrix() const { return rows_; }
  /// Conditional law given source atom i.
  AtomicMeasure row(std::size_t i) const;

 private:
  std::vector<double> source_positions_;
  AtomicMeasure target_;
  std::vector<double> rows_;
};

/// Joint law of three times glued along a shared middle marginal, as a dense
/// n1 x n2 x n3 tensor.
class TripleLaw {
 public:
  TripleLaw(AtomicMeasure first, AtomicMeasure second, AtomicMeasure third,
            std::vector<double> tensor);

  const AtomicMeasure& marginal(int axis) const;
  double operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return tensor_[(i * n2_ + j) * n3_ + k];
  }
  std::span<const double> tensor() const { return tensor_; }
  std::size_t extent(int axis) const;

  Coupling project12() const;
  Coupling project23() const;
  Coupling project13() const;

 private:
  AtomicMeasure first_, second_, third_;
  std::size_t n1_, n2_, n3_;
  std::vector<double> tensor_;
};

Kernel kernel_of(const Coupling& p);

/// Row-stochastic composition (k.k')(x, .) = sum_y k'(y, .) k(x, y).
Kernel compose(const Kernel& k1, const Kernel& k2);

/// Coupling with the given first marginal and kernel.
Coupling coupling_of(const AtomicMeasure& source, const Kernel& k);

/// P.Q, the (1,3) projection of the concatenation. Throws PreconditionError
/// unless p.target() and q.source() carry the same atoms.
Coupling product(const Coupling& p, const Coupling& q);

/// Concatenation: entry (i,j,k) = p12(i,j) * p23(j,k) / mu2(j).
TripleLaw concat(const Coupling& p12, const Coupling& p23);

/// Consecutive kernel rows are ordered by the stochastic order.
bool increasing_kernel(const Coupling& p, double tol = kEqualTol);

/// Lower orthant order: the joint CDF of p dominates that of q on the
/// product atom grid. Throws PreconditionError unless both marginals agree.
bool lo_leq(const Coupling& p, const Coupling& q, double tol = kEqualTol);

/// Sup-distance between joint CDFs, evaluated on the union of both grids.
double joint_cdf_distance(const Coupling& p, const Coupling& q);

bool approx_equal(const Coupling& p, const Coupling& q, double tol = kEqualTol);

}  // namespace mqt
