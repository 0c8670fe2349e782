#include "mqt/markov_quantile.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <random>
#include <string>

#include "mqt/errors.hpp"
#include "mqt/kernels.hpp"

namespace mqt {

void MQConfig::validate() const {
  if (!(cdf_tol > 0.0)) throw PreconditionError("cdf_tol must be positive");
  if (max_depth < 1 || max_depth > 16) throw PreconditionError("max_depth must lie in [1,16]");
}

GridPathLaw quantile_law(const MarginalCurve& c, const TimePartition& grid) {
  const std::size_t T = grid.size();
  const auto K = static_cast<std::size_t>(c.level_count());
  std::vector<std::vector<double>> pos(T);
  std::vector<std::uint32_t> states(K * T);
  for (std::size_t t = 0; t < T; ++t) {
    const auto mu = c.marginal_at(grid[t]);
    pos[t].assign(mu.positions().begin(), mu.positions().end());
    const auto v = c.level_values(grid[t]);
    for (std::size_t k = 0; k < K; ++k) states[k * T + t] = static_cast<std::uint32_t>(mu.find(v[k]));
  }
  std::vector<double> masses(K, 1.0 / static_cast<double>(K));
  LawOrigin origin;
  origin.kind = LawOrigin::Kind::quantile;
  return GridPathLaw(grid, JointLaw::from_paths(pos, states, masses), Interpolation::quantile_follow,
                     origin);
}

GridPathLaw q_markovized(const MarginalCurve& c, const TimePartition& r, const TimePartition& grid) {
  const auto inner = r.interior();
  for (double t : inner)
    if (grid.index_of(t) == 0 || grid.index_of(t) + 1 >= grid.size())
      throw PreconditionError("Markov time " + std::to_string(t) + " is not an interior grid time");
  return make_markov_at(quantile_law(c, grid), inner);
}

Coupling quantile_product(const MarginalCurve& c, const TimePartition& r) {
  std::vector<std::optional<AtomicMeasure>> mus(r.size());
  kernels::omp::for_each_index(r.size(), [&](std::size_t i) { mus[i].emplace(c.marginal_at(r[i])); });
  Coupling acc = quantile_coupling(*mus[0], *mus[1]);
  for (std::size_t k = 1; k + 1 < r.size(); ++k) acc = product(acc, quantile_coupling(*mus[k], *mus[k + 1]));
  return acc;
}

MQTrace mq_coupling_trace(const MarginalCurve& c, double s, double t, const MQConfig& cfg) {
  cfg.validate();
  if (!(0.0 <= s && s < t && t <= 1.0)) throw DomainError("mq_coupling needs 0 <= s < t <= 1");
  auto current = quantile_product(c, TimePartition::dyadic(s, t, 0, c.special_times()));
  MQTrace trace{current, std::nullopt, {}, false};
  for (int depth = 1; depth <= cfg.max_depth; ++depth) {
    auto next = quantile_product(c, TimePartition::dyadic(s, t, depth, c.special_times()));
    const double d = joint_cdf_distance(next, trace.coupling);
    trace.steps.emplace_back(depth, d);
    trace.previous = std::move(trace.coupling);
    trace.coupling = std::move(next);
    if (d < cfg.cdf_tol) {
      trace.converged = true;
      break;
    }
  }
  return trace;
}

NotConverged::NotConverged(MQTrace trace)
    : std::runtime_error("Markov-quantile products did not stabilize by depth " +
                         std::to_string(trace.steps.back().first) + " (last distance " +
                         std::to_string(trace.steps.back().second) + ")"),
      trace_(std::move(trace)) {}

Coupling mq_coupling(const MarginalCurve& c, double s, double t, const MQConfig& cfg) {
  auto trace = mq_coupling_trace(c, s, t, cfg);
  if (!trace.converged) throw NotConverged(std::move(trace));
  return std::move(trace.coupling);
}

GridPathLaw mq_chain(const MarginalCurve& c, const TimePartition& grid, const MQConfig& cfg) {
  cfg.validate();
  const std::size_t n = grid.intervals();
  std::vector<std::optional<Kernel>> ks(n);
  std::vector<std::exception_ptr> errors(n);
  kernels::omp::for_each_index(n, [&](std::size_t k) {
    try {
      ks[k].emplace(kernel_of(mq_coupling(c, grid[k], grid[k + 1], cfg)));
    } catch (...) {
      errors[k] = std::current_exception();
    }
  });
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<Kernel> transitions;
  transitions.reserve(n);
  for (auto& k : ks) transitions.push_back(std::move(*k));
  LawOrigin origin;
  origin.kind = LawOrigin::Kind::markov_quantile;
  origin.cdf_tol = cfg.cdf_tol;
  origin.max_depth = cfg.max_depth;
  return GridPathLaw(grid, ChainLaw(c.marginal_at(grid.front()), std::move(transitions)),
                     Interpolation::quantile_follow, origin);
}

namespace {

// Uniform double in (0,1) from 53 random bits; avoids the
// implementation-defined std::uniform_real_distribution.
double open_unit(std::mt19937_64& gen) {
  for (;;) {
    const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    if (u > 0.0) return u;
  }
}

}  // namespace

PathSet sample_paths(const MarginalCurve& c, const TimePartition& r, std::size_t n_paths,
                     std::uint64_t seed, std::size_t n_steps) {
  if (n_paths == 0) throw PreconditionError("need at least one path");
  if (n_steps == 0) throw PreconditionError("need at least one time step");
  const auto mesh = TimePartition::uniform(0.0, 1.0, n_steps).with(r.times());
  const std::size_t T = mesh.size();
  const int K = c.level_count();

  // Level values per mesh time and, at interior times of r, the marginal
  // used for the level-interval redraw.
  std::vector<std::vector<double>> values(T);
  std::vector<std::optional<AtomicMeasure>> redraw(T);
  std::vector<bool> is_markov_time(T, false);
  for (double t : r.interior()) is_markov_time[mesh.index_of(t)] = true;
  for (std::size_t i = 0; i < T; ++i) {
    values[i] = c.level_values(mesh[i]);
    if (is_markov_time[i]) redraw[i].emplace(c.marginal_at(mesh[i]));
  }
  auto level_index = [K](double alpha) {
    const auto k = static_cast<int>(std::ceil(alpha * K));
    return static_cast<std::size_t>(std::clamp(k, 1, K) - 1);
  };

  PathSet out;
  out.times.assign(mesh.times().begin(), mesh.times().end());
  out.n_paths = n_paths;
  out.positions.resize(n_paths * T);
  kernels::omp::for_each_index(n_paths, [&](std::size_t p) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(p), static_cast<std::uint32_t>(p >> 32)};
    std::mt19937_64 gen(seq);
    double alpha = open_unit(gen);
    for (std::size_t i = 0; i < T; ++i) {
      const double x = values[i][level_index(alpha)];
      out.positions[p * T + i] = x;
      if (redraw[i]) {
        const double lo = cdf_left(*redraw[i], x);
        const double hi = cdf(*redraw[i], x);
        if (hi > lo) alpha = lo + (hi - lo) * open_unit(gen);
      }
    }
  });
  return out;
}

}  // namespace mqt
