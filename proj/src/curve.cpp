#include "mqt/curve.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "mqt/errors.hpp"
#include "mqt/kernels.hpp"

namespace mqt {

// ---------------------------------------------------------------------------
// TimePartition

TimePartition::TimePartition(std::vector<double> times) : times_(std::move(times)) {
  if (times_.size() < 2) throw PreconditionError("a partition needs at least two times");
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (!std::isfinite(times_[i]) || times_[i] < 0.0 || times_[i] > 1.0)
      throw PreconditionError("partition times must lie in [0,1]");
    if (i > 0 && !(times_[i] > times_[i - 1]))
      throw PreconditionError("partition times must be strictly increasing");
  }
}

namespace {

constexpr double kTimeTol = 1e-12;

std::vector<double> merge_times(std::vector<double> base, std::span<const double> extra, double lo,
                                double hi) {
  for (double t : extra)
    if (t > lo + kTimeTol && t < hi - kTimeTol) base.push_back(t);
  std::sort(base.begin(), base.end());
  std::vector<double> out;
  for (double t : base)
    if (out.empty() || t - out.back() > kTimeTol) out.push_back(t);
  // Keep the exact endpoints.
  out.front() = lo;
  out.back() = hi;
  return out;
}

}  // namespace

TimePartition TimePartition::dyadic(double a, double b, int depth, std::span<const double> forced) {
  if (!(a < b)) throw PreconditionError("dyadic partition needs a < b");
  if (depth < 0 || depth > 30) throw PreconditionError("dyadic depth out of range");
  const std::size_t n = std::size_t{1} << depth;
  std::vector<double> ts(n + 1);
  for (std::size_t k = 0; k <= n; ++k)
    ts[k] = a + (b - a) * static_cast<double>(k) / static_cast<double>(n);
  ts.back() = b;
  return TimePartition(merge_times(std::move(ts), forced, a, b));
}

TimePartition TimePartition::uniform(double a, double b, std::size_t intervals) {
  if (intervals == 0 || !(a < b)) throw PreconditionError("uniform partition needs a < b and n > 0");
  std::vector<double> ts(intervals + 1);
  for (std::size_t k = 0; k <= intervals; ++k)
    ts[k] = a + (b - a) * static_cast<double>(k) / static_cast<double>(intervals);
  ts.back() = b;
  return TimePartition(std::move(ts));
}

TimePartition TimePartition::parse(const std::string& text) {
  std::vector<double> ts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      ts.push_back(std::stod(item, &used));
      while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ParseError("partition", "not a number: '" + item + "'");
    }
  }
  try {
    return TimePartition(std::move(ts));
  } catch (const PreconditionError& e) {
    throw ParseError("partition", e.what());
  }
}

std::vector<double> TimePartition::interior() const {
  return std::vector<double>(times_.begin() + 1, times_.end() - 1);
}

double TimePartition::mesh() const {
  double h = 0.0;
  for (std::size_t i = 1; i < times_.size(); ++i) h = std::max(h, times_[i] - times_[i - 1]);
  return h;
}

std::size_t TimePartition::index_of(double t, double tol) const {
  auto it = std::lower_bound(times_.begin(), times_.end(), t - tol);
  if (it != times_.end() && std::abs(*it - t) <= tol) return static_cast<std::size_t>(it - times_.begin());
  return size();
}

bool TimePartition::contains_all(std::span<const double> ts, double tol) const {
  return std::all_of(ts.begin(), ts.end(), [&](double t) { return contains(t, tol); });
}

TimePartition TimePartition::refined(int depth, std::span<const double> forced) const {
  if (depth < 0 || depth > 30) throw PreconditionError("refinement depth out of range");
  const std::size_t pieces = std::size_t{1} << depth;
  std::vector<double> ts;
  ts.reserve(intervals() * pieces + 1);
  for (std::size_t i = 0; i + 1 < times_.size(); ++i) {
    const double a = times_[i], b = times_[i + 1];
    for (std::size_t k = 0; k < pieces; ++k)
      ts.push_back(a + (b - a) * static_cast<double>(k) / static_cast<double>(pieces));
  }
  ts.push_back(back());
  return TimePartition(merge_times(std::move(ts), forced, front(), back()));
}

TimePartition TimePartition::with(std::span<const double> extra) const {
  return TimePartition(merge_times(times_, extra, front(), back()));
}

// ---------------------------------------------------------------------------
// MarginalCurve

std::string to_string(CurveKind kind) {
  switch (kind) {
    case CurveKind::translation: return "translation";
    case CurveKind::scaling: return "scaling";
    case CurveKind::split_merge: return "split_merge";
    case CurveKind::moving_point: return "moving_point";
    case CurveKind::constant: return "constant";
    case CurveKind::grid: return "grid";
  }
  return "unknown";
}

struct MarginalCurve::Impl {
  CurveKind kind = CurveKind::constant;
  int levels = 1;
  std::vector<double> special;
  double param = 1.0;  // velocity or rate

  // constant: quantile step function (empty means G = alpha)
  std::vector<double> breaks;
  std::vector<double> values;

  // grid
  std::vector<double> times;
  std::vector<double> alpha_levels;
  std::vector<std::vector<double>> rows;

  double eval(double t, double alpha) const {
    switch (kind) {
      case CurveKind::translation: return alpha + param * t;
      case CurveKind::scaling: return (1.0 + param * t) * (alpha - 0.5);
      case CurveKind::split_merge: {
        const double d = std::abs(t - 0.5);
        return alpha <= 0.5 ? -d : d;
      }
      case CurveKind::moving_point: return t * t;
      case CurveKind::constant: {
        if (breaks.empty()) return alpha;
        auto it = std::lower_bound(breaks.begin(), breaks.end(), alpha);
        if (it == breaks.end()) return values.back();
        return values[static_cast<std::size_t>(it - breaks.begin())];
      }
      case CurveKind::grid: {
        auto jt = std::lower_bound(alpha_levels.begin(), alpha_levels.end(), alpha);
        const std::size_t j = jt == alpha_levels.end() ? alpha_levels.size() - 1
                                                       : static_cast<std::size_t>(jt - alpha_levels.begin());
        auto it = std::upper_bound(times.begin(), times.end(), t);
        if (it == times.begin()) return rows.front()[j];
        const std::size_t i = static_cast<std::size_t>(it - times.begin()) - 1;
        if (i + 1 >= times.size()) return rows.back()[j];
        const double lam = (t - times[i]) / (times[i + 1] - times[i]);
        const double v0 = rows[i][j], v1 = rows[i + 1][j];
        return v0 + lam * (v1 - v0);
      }
    }
    return 0.0;
  }
};

MarginalCurve::MarginalCurve(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

namespace {

void check_levels(int levels) {
  if (levels < 1) throw PreconditionError("level count must be positive");
}

}  // namespace

MarginalCurve MarginalCurve::translation(int levels, double velocity) {
  check_levels(levels);
  auto p = std::make_shared<Impl>();
  p->kind = CurveKind::translation;
  p->levels = levels;
  p->param = velocity;
  return MarginalCurve(p);
}

MarginalCurve MarginalCurve::scaling(int levels, double rate) {
  check_levels(levels);
  if (!(1.0 + rate > 0.0)) throw PreconditionError("scaling rate must keep 1 + rate*t positive");
  auto p = std::make_shared<Impl>();
  p->kind = CurveKind::scaling;
  p->levels = levels;
  p->param = rate;
  return MarginalCurve(p);
}

MarginalCurve MarginalCurve::split_merge(int levels) {
  check_levels(levels);
  auto p = std::make_shared<Impl>();
  p->kind = CurveKind::split_merge;
  p->levels = levels;
  p->special = {0.5};
  return MarginalCurve(p);
}

MarginalCurve MarginalCurve::moving_point(int levels) {
  check_levels(levels);
  auto p = std::make_shared<Impl>();
  p->kind = CurveKind::moving_point;
  p->levels = levels;
  return MarginalCurve(p);
}

MarginalCurve MarginalCurve::constant(int levels, const AtomicMeasure& mu) {
  check_levels(levels);
  auto p = std::make_shared<Impl>();
  p->kind = CurveKind::constant;
  p->levels = levels;
  p->breaks.assign(mu.cumulative().begin(), mu.cumulative().end());
  p->values.assign(mu.positions().begin(), mu.positions().end());
  return MarginalCurve(p);
}

MarginalCurve MarginalCurve::constant(int levels) {
  check_levels(levels);
  auto p = std::make_shared<Impl>();
  p->kind = CurveKind::constant;
  p->levels = levels;
  return MarginalCurve(p);
}

MarginalCurve MarginalCurve::grid(std::vector<double> times, std::vector<double> alpha_levels,
                                  std::vector<std::vector<double>> values, int levels) {
  check_levels(levels);
  if (times.size() < 2) throw PreconditionError("grid curve needs at least two times");
  if (times.front() != 0.0 || times.back() != 1.0)
    throw PreconditionError("grid curve times must start at 0 and end at 1");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (times[i] < times[i - 1]) throw PreconditionError("grid curve times must be nondecreasing");
    if (i >= 2 && times[i] == times[i - 2])
      throw PreconditionError("grid curve time repeated more than twice");
  }
  if (alpha_levels.empty()) throw PreconditionError("grid curve needs at least one level");
  for (std::size_t j = 0; j < alpha_levels.size(); ++j) {
    if (!(alpha_levels[j] > 0.0 && alpha_levels[j] <= 1.0))
      throw PreconditionError("grid curve levels must lie in (0,1]");
    if (j > 0 && !(alpha_levels[j] > alpha_levels[j - 1]))
      throw PreconditionError("grid curve levels must be strictly increasing");
  }
  if (values.size() != times.size()) throw PreconditionError("grid curve needs one value row per time");
  for (const auto& row : values) {
    if (row.size() != alpha_levels.size())
      throw PreconditionError("grid curve rows must have one value per level");
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (!std::isfinite(row[j])) throw PreconditionError("grid curve value is not finite");
      if (j > 0 && row[j] < row[j - 1]) throw PreconditionError("grid curve rows must be monotone");
    }
  }
  auto p = std::make_shared<Impl>();
  p->kind = CurveKind::grid;
  p->levels = levels;
  for (double t : times)
    if (t > 0.0 && t < 1.0 && (p->special.empty() || p->special.back() != t)) p->special.push_back(t);
  p->times = std::move(times);
  p->alpha_levels = std::move(alpha_levels);
  p->rows = std::move(values);
  return MarginalCurve(p);
}

CurveKind MarginalCurve::kind() const { return impl_->kind; }
int MarginalCurve::level_count() const { return impl_->levels; }
std::span<const double> MarginalCurve::special_times() const { return impl_->special; }

MarginalCurve MarginalCurve::with_levels(int levels) const {
  check_levels(levels);
  auto p = std::make_shared<Impl>(*impl_);
  p->levels = levels;
  return MarginalCurve(p);
}

MarginalCurve MarginalCurve::with_special_times(std::span<const double> extra) const {
  return with_only_special_times(std::vector<double>(special_times().begin(), special_times().end()), extra);
}

MarginalCurve MarginalCurve::with_only_special_times(std::span<const double> times) const {
  return with_only_special_times({}, times);
}

MarginalCurve MarginalCurve::with_only_special_times(std::vector<double> base,
                                                     std::span<const double> extra) const {
  auto p = std::make_shared<Impl>(*impl_);
  p->special = std::move(base);
  for (double t : extra) {
    if (!(t > 0.0 && t < 1.0)) throw PreconditionError("special times must lie in (0,1)");
    p->special.push_back(t);
  }
  std::sort(p->special.begin(), p->special.end());
  p->special.erase(std::unique(p->special.begin(), p->special.end()), p->special.end());
  return MarginalCurve(p);
}

double MarginalCurve::quantile(double t, double alpha) const {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("curve time must lie in [0,1]");
  return impl_->eval(t, alpha);
}

double MarginalCurve::level(int k) const {
  return (static_cast<double>(k) - 0.5) / static_cast<double>(impl_->levels);
}

std::vector<double> MarginalCurve::level_values(double t) const {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("curve time must lie in [0,1]");
  std::vector<double> v(static_cast<std::size_t>(impl_->levels));
  for (int k = 1; k <= impl_->levels; ++k) v[static_cast<std::size_t>(k - 1)] = impl_->eval(t, level(k));
  return v;
}

AtomicMeasure MarginalCurve::marginal_at(double t) const {
  const auto v = level_values(t);
  const double unit = 1.0 / static_cast<double>(impl_->levels);
  std::vector<double> xs, ms;
  std::size_t run = 0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    ++run;
    if (k + 1 == v.size() || v[k + 1] != v[k]) {
      xs.push_back(v[k]);
      ms.push_back(static_cast<double>(run) * unit);
      run = 0;
    }
  }
  return AtomicMeasure(std::move(xs), std::move(ms));
}

// ---------------------------------------------------------------------------
// Energy and length

namespace {

std::vector<AtomicMeasure> marginals_on(const MarginalCurve& c, const TimePartition& r) {
  std::vector<std::optional<AtomicMeasure>> slots(r.size());
  kernels::omp::for_each_index(r.size(), [&](std::size_t i) { slots[i].emplace(c.marginal_at(r[i])); });
  std::vector<AtomicMeasure> out;
  out.reserve(r.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

template <class Term>
double partition_sum(const MarginalCurve& c, const TimePartition& r, Term term) {
  const auto mus = marginals_on(c, r);
  return kernels::omp::reduce_sum(r.intervals(), [&](std::size_t k) {
    return term(w2(mus[k], mus[k + 1]), r[k + 1] - r[k]);
  });
}

template <class Term>
RefinementReport refine(const MarginalCurve& c, double tol, double a, double b,
                        const RefinementOptions& opts, Term term) {
  if (!(tol > 0.0)) throw PreconditionError("tolerance must be positive");
  if (!(0.0 <= a && a < b && b <= 1.0)) throw PreconditionError("need 0 <= a < b <= 1");
  RefinementReport rep;
  double prev = 0.0;
  for (int depth = 0; (std::size_t{1} << depth) <= opts.max_intervals; ++depth) {
    const auto r = TimePartition::dyadic(a, b, depth, c.special_times());
    const double v = partition_sum(c, r, term);
    rep.trace.emplace_back(depth, v);
    rep.value = v;
    rep.depth = depth;
    if (depth >= std::max(1, opts.min_depth) && std::abs(v - prev) < tol) {
      rep.converged = true;
      return rep;
    }
    prev = v;
  }
  return rep;
}

double energy_term(double w, double dt) { return w * w / dt; }
double length_term(double w, double) { return w; }

}  // namespace

double energy_partition(const MarginalCurve& c, const TimePartition& r) {
  return partition_sum(c, r, energy_term);
}

double length_partition(const MarginalCurve& c, const TimePartition& r) {
  return partition_sum(c, r, length_term);
}

RefinementReport energy(const MarginalCurve& c, double tol, double a, double b,
                        const RefinementOptions& opts) {
  return refine(c, tol, a, b, opts, energy_term);
}

RefinementReport length(const MarginalCurve& c, double tol, double a, double b,
                        const RefinementOptions& opts) {
  return refine(c, tol, a, b, opts, length_term);
}

}  // namespace mqt
