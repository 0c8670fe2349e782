#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mqt/coupling.hpp"
#include "mqt/curve.hpp"
#include "mqt/markov_quantile.hpp"
#include "mqt/measure.hpp"
#include "mqt/process.hpp"

// Brute-force ground truth for tiny instances. Nothing here is meant to scale.
namespace mqt::oracle {

struct PermutationCost {
  double cost = 0.0;
  /// Target atom assigned to source atom i.
  std::vector<std::size_t> permutation;
};

/// Exhaustive minimum of sum_i |y_sigma(i) - x_i|^2 / n over all n!
/// permutations. Both measures must have n atoms of mass 1/n. Ties keep the
/// lexicographically first permutation, so the identity wins when optimal.
/// Throws ResourceError for n > 7.
PermutationCost min_cost_over_permutations(const AtomicMeasure& mu, const AtomicMeasure& nu);

/// Direct three-time Markovization at the middle time:
/// out(i,j,k) = P12(i,j) P23(j,k) / mu2(j), with P12 and P23 the two-time
/// projections of the dense tensor over the given marginals.
std::vector<double> markovize_middle(const std::vector<AtomicMeasure>& marginals,
                                     std::span<const double> tensor);

/// Every Markov chain on a grid of two or three times whose kernel rows lie
/// on the simplex mesh of step 1/m, whose transitions reproduce the curve's
/// marginals within 1e-9, and whose kernels are increasing.
class EnumeratedChainFamily {
 public:
  EnumeratedChainFamily(const MarginalCurve& c, TimePartition grid, int m,
                        std::size_t max_chains = 1'000'000);

  const TimePartition& grid() const { return grid_; }
  const std::vector<AtomicMeasure>& marginals() const { return marginals_; }
  int mesh() const { return m_; }
  /// Admissible kernels for transition k.
  const std::vector<Kernel>& kernels(std::size_t k) const { return kernels_[k]; }
  /// Number of chains (product of the per-transition counts).
  std::size_t size() const;
  /// Chain with mixed-radix index `index` over the per-transition lists.
  GridPathLaw chain(std::size_t index) const;

 private:
  TimePartition grid_;
  int m_;
  std::vector<AtomicMeasure> marginals_;
  std::vector<std::vector<Kernel>> kernels_;
};

/// Law(X_t | X_s <= x) for grid times s < t of `l`, computed from its joint
/// law. Throws PreconditionError when the event has no mass or s, t are not
/// grid times.
AtomicMeasure conditional_law(const GridPathLaw& l, double s, double t, double x);

struct ProbeResult {
  bool minimal = true;
  std::size_t checked = 0;
  /// Indices of family chains whose conditional law is not above the
  /// candidate's in the stochastic order.
  std::vector<std::size_t> violations;
};

/// Compares Law(X_t | X_s <= x) under `candidate` with the same conditional
/// law under every chain of `fam`.
ProbeResult sto_min_probe(const GridPathLaw& candidate, const EnumeratedChainFamily& fam, double s,
                          double t, double x, double tol = 1e-10);

/// Probe with the Markov-quantile chain of `c` on the family grid as candidate.
bool sto_min_probe(const MarginalCurve& c, const EnumeratedChainFamily& fam, double s, double t,
                   double x, const MQConfig& cfg = {});

}  // namespace mqt::oracle
