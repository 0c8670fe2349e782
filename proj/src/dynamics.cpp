#include "mqt/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "mqt/errors.hpp"
#include "mqt/kernels.hpp"

namespace mqt {

// ---------------------------------------------------------------------------
// Action

double action_chord(const GridPathLaw& l) {
  const auto& grid = l.grid();
  if (!l.is_chain()) {
    const auto& law = l.joint();
    return kernels::omp::reduce_sum(law.n_paths(), [&](std::size_t p) {
      double s = 0.0;
      for (std::size_t k = 0; k + 1 < law.n_times(); ++k) {
        const double d = law.position(p, k + 1) - law.position(p, k);
        s += d * d / (grid[k + 1] - grid[k]);
      }
      return law.mass(p) * s;
    });
  }
  const auto& ch = l.chain();
  return kernels::omp::reduce_sum(grid.intervals(), [&](std::size_t k) {
    const auto& mu = ch.marginal(k);
    const auto& ker = ch.transition(k);
    const auto& tgt = ker.target_support();
    double s = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i)
      for (std::size_t j = 0; j < tgt.size(); ++j) {
        const double w = ker(i, j);
        if (w == 0.0) continue;
        const double d = tgt.position(j) - mu.position(i);
        s += mu.mass(i) * w * d * d;
      }
    return s / (grid[k + 1] - grid[k]);
  });
}

RefinementReport action(const MarginalCurve& c, const GridPathLaw& l, double tol,
                        const RefinementOptions& opts) {
  if (!(tol > 0.0)) throw PreconditionError("tolerance must be positive");
  RefinementReport rep;
  if (l.interpolation() == Interpolation::linear) {
    rep.value = action_chord(l);
    rep.converged = true;
    rep.trace.emplace_back(0, rep.value);
    return rep;
  }
  const auto& origin = l.origin();
  auto rebuild = [&](const TimePartition& g) {
    switch (origin.kind) {
      case LawOrigin::Kind::quantile:
        return make_markov_at(quantile_law(c, g), origin.markov_times);
      case LawOrigin::Kind::markov_quantile:
        return mq_chain(c, g, MQConfig{origin.cdf_tol, origin.max_depth});
      default:
        throw PreconditionError("quantile-following law without a known origin cannot be refined");
    }
  };
  double prev = 0.0;
  for (int depth = 0;; ++depth) {
    const auto g = l.grid().refined(depth, c.special_times());
    if (g.intervals() > opts.max_intervals) break;
    const double v = action_chord(rebuild(g));
    rep.trace.emplace_back(depth, v);
    rep.value = v;
    rep.depth = depth;
    if (depth >= std::max(1, opts.min_depth) && std::abs(v - prev) < tol) {
      rep.converged = true;
      break;
    }
    prev = v;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Linear interpolation between partition times

GridPathLaw disp_construct(const MarginalCurve& c, const TimePartition& r) {
  std::vector<AtomicMeasure> mus;
  mus.reserve(r.size());
  for (double t : r.times()) mus.push_back(c.marginal_at(t));
  std::vector<Kernel> ks;
  ks.reserve(r.intervals());
  for (std::size_t k = 0; k + 1 < r.size(); ++k) ks.push_back(kernel_of(quantile_coupling(mus[k], mus[k + 1])));
  LawOrigin origin;
  origin.kind = LawOrigin::Kind::displacement;
  return GridPathLaw(r, ChainLaw(mus.front(), std::move(ks)), Interpolation::linear, origin);
}

namespace {

// Segment k with r_k <= t <= r_{k+1}, preferring the right segment at grid
// times, and the interpolation weight inside it.
std::pair<std::size_t, double> locate(const TimePartition& g, double t) {
  if (!(t >= g.front() && t <= g.back())) throw DomainError("time outside the law's grid");
  auto it = std::upper_bound(g.times().begin(), g.times().end(), t);
  auto k = static_cast<std::size_t>(it - g.times().begin());
  k = std::min(k == 0 ? 0 : k - 1, g.size() - 2);
  const double lam = (t - g[k]) / (g[k + 1] - g[k]);
  return {k, std::clamp(lam, 0.0, 1.0)};
}

double lerp(double x, double y, double lam) { return (1.0 - lam) * x + lam * y; }

void require_linear(const GridPathLaw& l) {
  if (l.interpolation() != Interpolation::linear)
    throw PreconditionError("law is not linearly interpolated");
}

}  // namespace

Coupling linear_two_time(const GridPathLaw& l, double s, double t) {
  require_linear(l);
  if (!(s < t)) throw PreconditionError("linear_two_time needs s < t");
  const auto& g = l.grid();
  const auto [ks, ls] = locate(g, s);
  auto [kt, lt] = locate(g, t);
  if (kt < ks) kt = ks;  // cannot happen for s < t, kept for clarity of the invariant
  std::vector<Coupling::Entry> out;

  if (!l.is_chain()) {
    const auto& law = l.joint();
    for (std::size_t p = 0; p < law.n_paths(); ++p) {
      const double xs = lerp(law.position(p, ks), law.position(p, ks + 1), ls);
      const double xt = lerp(law.position(p, kt), law.position(p, kt + 1), lt);
      out.push_back({xs, xt, law.mass(p)});
    }
    return Coupling::from_entries(out);
  }

  const auto& ch = l.chain();
  const Coupling first = ch.two_time(ks, ks + 1);
  if (kt == ks) {
    for (std::size_t i = 0; i < first.rows(); ++i)
      for (std::size_t j = 0; j < first.cols(); ++j) {
        const double w = first(i, j);
        if (w == 0.0) continue;
        const double x = first.source().position(i), y = first.target().position(j);
        out.push_back({lerp(x, y, ls), lerp(x, y, lt), w});
      }
    return Coupling::from_entries(out);
  }

  // (X_s, state at r_{ks+1}) as weighted entries.
  struct Partial {
    double xs;
    std::size_t state;
    double mass;
  };
  std::vector<Partial> cur;
  for (std::size_t i = 0; i < first.rows(); ++i)
    for (std::size_t j = 0; j < first.cols(); ++j)
      if (first(i, j) > 0.0)
        cur.push_back({lerp(first.source().position(i), first.target().position(j), ls), j, first(i, j)});

  // Carry the state forward to r_kt through the chain.
  for (std::size_t k = ks + 1; k < kt; ++k) {
    const auto& ker = ch.transition(k);
    std::vector<Partial> next;
    for (const auto& p : cur)
      for (std::size_t b = 0; b < ker.target_support().size(); ++b)
        if (ker(p.state, b) > 0.0) next.push_back({p.xs, b, p.mass * ker(p.state, b)});
    cur = std::move(next);
  }

  const auto& mu = ch.marginal(kt);
  const auto& ker = ch.transition(kt);
  for (const auto& p : cur)
    for (std::size_t b = 0; b < ker.target_support().size(); ++b) {
      const double w = ker(p.state, b);
      if (w == 0.0) continue;
      out.push_back({p.xs, lerp(mu.position(p.state), ker.target_support().position(b), lt), p.mass * w});
    }
  return Coupling::from_entries(out);
}

AtomicMeasure linear_marginal(const GridPathLaw& l, double t) {
  require_linear(l);
  const auto& g = l.grid();
  const std::size_t idx = g.index_of(t, 0.0);
  if (idx < g.size()) return l.marginal(idx);
  const auto [k, lam] = locate(g, t);
  const Coupling p = l.two_time(k, k + 1);
  std::vector<Coupling::Entry> es;
  for (std::size_t i = 0; i < p.rows(); ++i)
    for (std::size_t j = 0; j < p.cols(); ++j)
      if (p(i, j) > 0.0)
        es.push_back({lerp(p.source().position(i), p.target().position(j), lam), 0.0, p(i, j)});
  return Coupling::from_entries(es).source();
}

// ---------------------------------------------------------------------------
// Velocity fields

VelocityField::VelocityField(MarginalCurve curve, double dt) : curve_(std::move(curve)), dt_(dt) {
  if (!(dt > 0.0 && dt < 0.5)) throw PreconditionError("difference half-width must lie in (0, 1/2)");
}

std::vector<double> VelocityField::level_velocities(double t) const {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("velocity time must lie in [0,1]");
  const double lo = std::max(0.0, t - dt_);
  const double hi = std::min(1.0, t + dt_);
  const auto a = curve_.level_values(lo);
  const auto b = curve_.level_values(hi);
  std::vector<double> v(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) v[k] = (b[k] - a[k]) / (hi - lo);
  return v;
}

double VelocityField::operator()(double t, double x) const {
  const auto vals = curve_.level_values(t);
  auto lo = std::lower_bound(vals.begin(), vals.end(), x);
  auto hi = std::upper_bound(vals.begin(), vals.end(), x);
  if (lo == hi) throw DomainError("velocity queried off the support at x = " + std::to_string(x));
  const auto v = level_velocities(t);
  double s = 0.0;
  for (auto it = lo; it != hi; ++it) s += v[static_cast<std::size_t>(it - vals.begin())];
  return s / static_cast<double>(hi - lo);
}

std::vector<std::pair<double, double>> VelocityField::on_support(double t) const {
  const auto vals = curve_.level_values(t);
  const auto v = level_velocities(t);
  std::vector<std::pair<double, double>> out;
  std::size_t start = 0;
  for (std::size_t k = 0; k < vals.size(); ++k) {
    if (k + 1 == vals.size() || vals[k + 1] != vals[k]) {
      double s = 0.0;
      for (std::size_t a = start; a <= k; ++a) s += v[a];
      out.emplace_back(vals[k], s / static_cast<double>(k + 1 - start));
      start = k + 1;
    }
  }
  return out;
}

VelocityField velocity_field(const MarginalCurve& c, double dt) { return VelocityField(c, dt); }

BarycentricField barycentric_velocity(const GridPathLaw& l, double t) {
  const auto& g = l.grid();
  const std::size_t at = g.index_of(t);
  if (l.interpolation() == Interpolation::quantile_follow && at == g.size())
    throw PreconditionError("quantile-following laws have barycentric velocities only at grid times");
  std::size_t k;
  double lam;
  if (at < g.size()) {
    k = std::min(at, g.size() - 2);
    lam = at == g.size() - 1 ? 1.0 : 0.0;
  } else {
    std::tie(k, lam) = locate(g, t);
  }
  const Coupling p = l.two_time(k, k + 1);
  const double dt = g[k + 1] - g[k];
  std::vector<Coupling::Entry> es;
  for (std::size_t i = 0; i < p.rows(); ++i)
    for (std::size_t j = 0; j < p.cols(); ++j)
      if (p(i, j) > 0.0) {
        const double x = p.source().position(i), y = p.target().position(j);
        es.push_back({lerp(x, y, lam), (y - x) / dt, p(i, j)});
      }
  std::sort(es.begin(), es.end(), [](const auto& a, const auto& b) { return a.x < b.x; });
  BarycentricField out;
  for (const auto& e : es) {
    const bool same = !out.positions.empty() &&
                      e.x - out.positions.back() <= 1e-12 * (1.0 + std::abs(out.positions.back()));
    if (!same) {
      out.positions.push_back(e.x);
      out.velocities.push_back(0.0);
      out.masses.push_back(0.0);
    }
    out.velocities.back() += e.mass * e.y;
    out.masses.back() += e.mass;
  }
  for (std::size_t a = 0; a < out.positions.size(); ++a) out.velocities[a] /= out.masses[a];
  return out;
}

// ---------------------------------------------------------------------------
// Weak continuity equation

namespace {

double bump(double u) {
  const double q = 4.0 * u * (1.0 - u);
  return q * q * q;
}

double bump_derivative(double u) {
  const double q = 4.0 * u * (1.0 - u);
  return 3.0 * q * q * 4.0 * (1.0 - 2.0 * u);
}

}  // namespace

double TestFunction::value(double x, double t) const {
  if (t <= t_lo || t >= t_hi) return 0.0;
  const double p = coeffs[0] + x * (coeffs[1] + x * (coeffs[2] + x * coeffs[3]));
  return p * bump((t - t_lo) / (t_hi - t_lo));
}

double TestFunction::dt(double x, double t) const {
  if (t <= t_lo || t >= t_hi) return 0.0;
  const double p = coeffs[0] + x * (coeffs[1] + x * (coeffs[2] + x * coeffs[3]));
  return p * bump_derivative((t - t_lo) / (t_hi - t_lo)) / (t_hi - t_lo);
}

double TestFunction::dx(double x, double t) const {
  if (t <= t_lo || t >= t_hi) return 0.0;
  const double dp = coeffs[1] + x * (2.0 * coeffs[2] + x * 3.0 * coeffs[3]);
  return dp * bump((t - t_lo) / (t_hi - t_lo));
}

std::vector<TestFunction> test_function_library() {
  return {
      {{1.0, 0.0, 0.0, 0.0}, 0.1, 0.9},
      {{0.0, 1.0, 0.0, 0.0}, 0.1, 0.9},
      {{0.0, 0.0, 1.0, 0.0}, 0.2, 0.8},
      {{0.0, -1.0, 0.0, 1.0}, 0.05, 0.95},
      {{1.0, 0.5, -0.25, 0.0}, 0.3, 0.7},
      {{0.2, -1.0, 0.3, 0.1}, 0.15, 0.6},
  };
}

TestFunction random_test_function(std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  auto unit = [&] { return static_cast<double>(gen() >> 11) * 0x1.0p-53; };
  TestFunction f;
  for (double& c : f.coeffs) c = 2.0 * unit() - 1.0;
  f.t_lo = 0.05 + 0.35 * unit();
  f.t_hi = 0.6 + 0.35 * unit();
  return f;
}

double continuity_residual(const MarginalCurve& c, const VelocityField& v, const TestFunction& phi,
                           std::size_t steps) {
  if (steps == 0) throw PreconditionError("quadrature needs at least one step");
  return continuity_residual_with(c, v, phi, steps);
}

double kinetic_energy(const MarginalCurve& c, const VelocityField& v, std::size_t steps) {
  if (steps == 0) throw PreconditionError("quadrature needs at least one step");
  const double h = 1.0 / static_cast<double>(steps);
  return kernels::omp::reduce_sum(steps, [&](std::size_t j) {
    const double t = (static_cast<double>(j) + 0.5) * h;
    const auto mu = c.marginal_at(t);
    const auto field = v.on_support(t);
    double s = 0.0;
    for (std::size_t a = 0; a < mu.size(); ++a) s += mu.mass(a) * field[a].second * field[a].second;
    return s * h;
  });
}

}  // namespace mqt
