#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mqt/coupling.hpp"
#include "mqt/curve.hpp"
#include "mqt/process.hpp"

namespace mqt {

struct MQConfig {
  /// Stabilization threshold on the joint-CDF sup-distance of successive
  /// dyadic products.
  double cdf_tol = 1e-9;
  /// Dyadic refinement cap, at most 16.
  int max_depth = 12;

  void validate() const;
};

/// Quantile process on `grid`: level (k - 1/2)/K carries mass 1/K along
/// (G(t, level))_{t in grid}.
GridPathLaw quantile_law(const MarginalCurve& c, const TimePartition& grid);

/// quantile_law(c, grid) made Markov at the interior times of `r`. Throws
/// PreconditionError unless every interior time of `r` is a grid time.
GridPathLaw q_markovized(const MarginalCurve& c, const TimePartition& r, const TimePartition& grid);

/// Product of quantile couplings between consecutive times of `r`.
Coupling quantile_product(const MarginalCurve& c, const TimePartition& r);

struct MQTrace {
  Coupling coupling;
  std::optional<Coupling> previous;
  /// (depth, joint-CDF distance to the previous depth) for depths 1, 2, ...
  std::vector<std::pair<int, double>> steps;
  bool converged = false;
};

/// Products of quantile couplings along the depth-n dyadic partitions of
/// [s,t] (special times forced in), refined until two successive products
/// are within cfg.cdf_tol. Never throws on non-convergence; inspect
/// `converged`.
MQTrace mq_coupling_trace(const MarginalCurve& c, double s, double t, const MQConfig& cfg = {});

/// Thrown by mq_coupling when the products do not stabilize by max_depth.
class NotConverged : public std::runtime_error {
 public:
  explicit NotConverged(MQTrace trace);
  const MQTrace& trace() const { return trace_; }

 private:
  MQTrace trace_;
};

/// Markov-quantile coupling between times s < t.
Coupling mq_coupling(const MarginalCurve& c, double s, double t, const MQConfig& cfg = {});

/// Chain with transitions kernel_of(mq_coupling) between consecutive grid times.
GridPathLaw mq_chain(const MarginalCurve& c, const TimePartition& grid, const MQConfig& cfg = {});

/// Sampled paths on a shared time mesh, row-major (path, time).
struct PathSet {
  std::vector<double> times;
  std::size_t n_paths = 0;
  std::vector<double> positions;

  double at(std::size_t path, std::size_t time) const { return positions[path * times.size() + time]; }
  std::span<const double> path(std::size_t p) const {
    return std::span<const double>(positions).subspan(p * times.size(), times.size());
  }
};

/// Paths of the quantile process made Markov at the interior times of `r`:
/// draw alpha uniformly, follow the quantized quantile curve on the mesh
/// {k/n_steps} united with `r`, and at each interior time of `r` redraw alpha
/// uniformly on the level interval ]F(x-), F(x)] of the current position.
/// Path p uses its own generator seeded from (seed, p), so the result does
/// not depend on the thread count.
PathSet sample_paths(const MarginalCurve& c, const TimePartition& r, std::size_t n_paths,
                     std::uint64_t seed, std::size_t n_steps);

}  // namespace mqt
