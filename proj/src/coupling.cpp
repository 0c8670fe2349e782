#include "mqt/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mqt/errors.hpp"
#include "mqt/kernels.hpp"

namespace mqt {

namespace {

void check_marginals(const AtomicMeasure& source, const AtomicMeasure& target,
                     std::span<const double> mass) {
  const std::size_t n = source.size(), m = target.size();
  if (mass.size() != n * m) throw PreconditionError("mass matrix has the wrong size");
  std::vector<double> col(m, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double v = mass[i * m + j];
      if (!(v >= 0.0)) throw PreconditionError("negative or non-finite coupling entry");
      row += v;
      col[j] += v;
    }
    if (std::abs(row - source.mass(i)) > kMassTol)
      throw PreconditionError("row " + std::to_string(i) + " does not sum to the source mass");
  }
  for (std::size_t j = 0; j < m; ++j) {
    if (std::abs(col[j] - target.mass(j)) > kMassTol)
      throw PreconditionError("column " + std::to_string(j) + " does not sum to the target mass");
  }
}

// Groups sorted values whose gaps are below the relative tolerance; returns
// the representative of each value's group.
std::vector<double> cluster(std::vector<double> values, double tol) {
  std::sort(values.begin(), values.end());
  std::vector<double> reps;
  for (double v : values) {
    if (reps.empty() || v - reps.back() > tol * (1.0 + std::abs(reps.back()))) reps.push_back(v);
  }
  return reps;
}

std::size_t nearest(std::span<const double> reps, double v) {
  auto it = std::lower_bound(reps.begin(), reps.end(), v);
  if (it == reps.end()) return reps.size() - 1;
  if (it == reps.begin()) return 0;
  auto prev = it - 1;
  return static_cast<std::size_t>((v - *prev <= *it - v ? prev : it) - reps.begin());
}

}  // namespace

Coupling::Coupling(AtomicMeasure source, AtomicMeasure target, std::vector<double> mass)
    : source_(std::move(source)), target_(std::move(target)), mass_(std::move(mass)) {
  check_marginals(source_, target_, mass_);
}

Coupling Coupling::identity(const AtomicMeasure& mu) {
  std::vector<double> mass(mu.size() * mu.size(), 0.0);
  for (std::size_t i = 0; i < mu.size(); ++i) mass[i * mu.size() + i] = mu.mass(i);
  return Coupling(mu, mu, std::move(mass));
}

Coupling Coupling::independent(const AtomicMeasure& mu, const AtomicMeasure& nu) {
  std::vector<double> mass(mu.size() * nu.size());
  for (std::size_t i = 0; i < mu.size(); ++i)
    for (std::size_t j = 0; j < nu.size(); ++j) mass[i * nu.size() + j] = mu.mass(i) * nu.mass(j);
  return Coupling(mu, nu, std::move(mass));
}

Coupling Coupling::from_entries(std::span<const Entry> entries, double merge_tol) {
  std::vector<double> xs, ys;
  double total = 0.0;
  for (const auto& e : entries) {
    if (e.mass <= 0.0) continue;
    xs.push_back(e.x);
    ys.push_back(e.y);
    total += e.mass;
  }
  if (xs.empty()) throw PreconditionError("no positive mass in coupling entries");
  const auto rx = cluster(xs, merge_tol);
  const auto ry = cluster(ys, merge_tol);
  std::vector<double> mass(rx.size() * ry.size(), 0.0);
  for (const auto& e : entries) {
    if (e.mass <= 0.0) continue;
    mass[nearest(rx, e.x) * ry.size() + nearest(ry, e.y)] += e.mass / total;
  }
  std::vector<double> mx(rx.size(), 0.0), my(ry.size(), 0.0);
  for (std::size_t i = 0; i < rx.size(); ++i)
    for (std::size_t j = 0; j < ry.size(); ++j) {
      mx[i] += mass[i * ry.size() + j];
      my[j] += mass[i * ry.size() + j];
    }
  return Coupling(AtomicMeasure(rx, mx), AtomicMeasure(ry, my), std::move(mass));
}

double Coupling::cost() const {
  double s = 0.0;
  for (std::size_t i = 0; i < rows(); ++i)
    for (std::size_t j = 0; j < cols(); ++j) {
      const double d = target_.position(j) - source_.position(i);
      s += (*this)(i, j) * d * d;
    }
  return s;
}

std::vector<double> Coupling::joint_cdf() const { return kernels::omp::joint_cdf(mass_, rows(), cols()); }

Kernel::Kernel(std::vector<double> source_positions, AtomicMeasure target_support,
               std::vector<double> rows)
    : source_positions_(std::move(source_positions)),
      target_(std::move(target_support)),
      rows_(std::move(rows)) {
  if (rows_.size() != source_positions_.size() * target_.size())
    throw PreconditionError("kernel matrix has the wrong size");
  const std::size_t m = target_.size();
  for (std::size_t i = 0; i < size(); ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      if (!(rows_[i * m + k] >= 0.0)) throw PreconditionError("negative kernel entry");
      s += rows_[i * m + k];
    }
    if (std::abs(s - 1.0) > kMassTol) throw PreconditionError("kernel row does not sum to 1");
  }
}

AtomicMeasure Kernel::row(std::size_t i) const {
  const std::size_t m = target_.size();
  return AtomicMeasure::from_weights(target_.positions(),
                                     std::span<const double>(rows_).subspan(i * m, m));
}

Kernel kernel_of(const Coupling& p) {
  const std::size_t n = p.rows(), m = p.cols();
  std::vector<double> rows(n * m);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < m; ++k) s += p(i, k);
    for (std::size_t k = 0; k < m; ++k) rows[i * m + k] = p(i, k) / s;
  }
  const auto src = p.source().positions();
  return Kernel(std::vector<double>(src.begin(), src.end()), p.target(), std::move(rows));
}

Kernel compose(const Kernel& k1, const Kernel& k2) {
  const auto mid = k2.source_positions();
  const auto tgt = k1.target_support().positions();
  if (mid.size() != tgt.size() || !std::equal(mid.begin(), mid.end(), tgt.begin()))
    throw PreconditionError("kernel supports do not chain");
  std::vector<double> ones(mid.size(), 1.0);
  auto rows = kernels::omp::compose(k1.matrix(), k1.size(), mid.size(), k2.matrix(),
                                    k2.target_support().size(), ones);
  const auto src = k1.source_positions();
  return Kernel(std::vector<double>(src.begin(), src.end()), k2.target_support(), std::move(rows));
}

Coupling coupling_of(const AtomicMeasure& source, const Kernel& k) {
  const auto src = k.source_positions();
  if (src.size() != source.size() || !std::equal(src.begin(), src.end(), source.positions().begin()))
    throw PreconditionError("kernel is not defined on the source support");
  const std::size_t n = source.size(), m = k.target_support().size();
  std::vector<double> mass(n * m);
  std::vector<double> col(m, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      mass[i * m + j] = source.mass(i) * k(i, j);
      col[j] += mass[i * m + j];
    }
  // The pushed-forward target need not be the kernel's reference marginal.
  std::vector<double> pos(k.target_support().positions().begin(),
                          k.target_support().positions().end());
  std::vector<double> keep_pos, keep_mass;
  std::vector<std::size_t> keep_idx;
  for (std::size_t j = 0; j < m; ++j) {
    if (col[j] >= kMinMass) {
      keep_pos.push_back(pos[j]);
      keep_mass.push_back(col[j]);
      keep_idx.push_back(j);
    }
  }
  if (keep_idx.size() == m) return Coupling(source, AtomicMeasure(keep_pos, keep_mass), std::move(mass));
  std::vector<double> reduced(n * keep_idx.size());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < keep_idx.size(); ++c) reduced[i * keep_idx.size() + c] = mass[i * m + keep_idx[c]];
  return Coupling(source, AtomicMeasure(keep_pos, keep_mass), std::move(reduced));
}

Coupling product(const Coupling& p, const Coupling& q) {
  if (!same_atoms(p.target(), q.source()))
    throw PreconditionError("product: target of the first plan differs from source of the second");
  const std::size_t m = p.cols();
  std::vector<double> mid(q.source().masses().begin(), q.source().masses().end());
  auto out = kernels::omp::compose(p.mass(), p.rows(), m, q.mass(), q.cols(), mid);
  return Coupling(p.source(), q.target(), std::move(out));
}

TripleLaw concat(const Coupling& p12, const Coupling& p23) {
  if (!same_atoms(p12.target(), p23.source()))
    throw PreconditionError("concat: middle marginals differ");
  const std::size_t n1 = p12.rows(), n2 = p12.cols(), n3 = p23.cols();
  std::vector<double> t(n1 * n2 * n3, 0.0);
  for (std::size_t i = 0; i < n1; ++i)
    for (std::size_t j = 0; j < n2; ++j) {
      const double a = p12(i, j);
      if (a == 0.0) continue;
      const double w = a / p23.source().mass(j);
      for (std::size_t k = 0; k < n3; ++k) t[(i * n2 + j) * n3 + k] = w * p23(j, k);
    }
  return TripleLaw(p12.source(), p12.target(), p23.target(), std::move(t));
}

TripleLaw::TripleLaw(AtomicMeasure first, AtomicMeasure second, AtomicMeasure third,
                     std::vector<double> tensor)
    : first_(std::move(first)),
      second_(std::move(second)),
      third_(std::move(third)),
      n1_(first_.size()),
      n2_(second_.size()),
      n3_(third_.size()),
      tensor_(std::move(tensor)) {
  if (tensor_.size() != n1_ * n2_ * n3_) throw PreconditionError("triple tensor has the wrong size");
  for (double v : tensor_)
    if (!(v >= 0.0)) throw PreconditionError("negative triple tensor entry");
  // Marginal checks go through the projections.
  (void)project12();
  (void)project23();
}

const AtomicMeasure& TripleLaw::marginal(int axis) const {
  switch (axis) {
    case 0: return first_;
    case 1: return second_;
    case 2: return third_;
    default: throw DomainError("triple law axis must be 0, 1 or 2");
  }
}

std::size_t TripleLaw::extent(int axis) const { return marginal(axis).size(); }

Coupling TripleLaw::project12() const {
  std::vector<double> m(n1_ * n2_, 0.0);
  for (std::size_t i = 0; i < n1_; ++i)
    for (std::size_t j = 0; j < n2_; ++j)
      for (std::size_t k = 0; k < n3_; ++k) m[i * n2_ + j] += (*this)(i, j, k);
  return Coupling(first_, second_, std::move(m));
}

Coupling TripleLaw::project23() const {
  std::vector<double> m(n2_ * n3_, 0.0);
  for (std::size_t i = 0; i < n1_; ++i)
    for (std::size_t j = 0; j < n2_; ++j)
      for (std::size_t k = 0; k < n3_; ++k) m[j * n3_ + k] += (*this)(i, j, k);
  return Coupling(second_, third_, std::move(m));
}

Coupling TripleLaw::project13() const {
  std::vector<double> m(n1_ * n3_, 0.0);
  for (std::size_t i = 0; i < n1_; ++i)
    for (std::size_t j = 0; j < n2_; ++j)
      for (std::size_t k = 0; k < n3_; ++k) m[i * n3_ + k] += (*this)(i, j, k);
  return Coupling(first_, third_, std::move(m));
}

bool increasing_kernel(const Coupling& p, double tol) {
  const std::size_t n = p.rows(), m = p.cols();
  std::vector<double> prev(m), cur(m);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      acc += p(i, k);
      cur[k] = acc / p.source().mass(i);
    }
    if (i > 0) {
      // Row i-1 must be sto-below row i: its CDF is pointwise larger.
      for (std::size_t k = 0; k < m; ++k)
        if (prev[k] < cur[k] - tol) return false;
    }
    std::swap(prev, cur);
  }
  return true;
}

bool lo_leq(const Coupling& p, const Coupling& q, double tol) {
  if (!same_atoms(p.source(), q.source()) || !same_atoms(p.target(), q.target()))
    throw PreconditionError("lower orthant order needs couplings with the same marginals");
  const auto fp = p.joint_cdf();
  const auto fq = q.joint_cdf();
  for (std::size_t i = 0; i < fp.size(); ++i)
    if (fp[i] < fq[i] - tol) return false;
  return true;
}

namespace {

// Joint CDF of p evaluated on an arbitrary grid (xs, ys), row-major.
std::vector<double> joint_cdf_on(const Coupling& p, std::span<const double> xs,
                                 std::span<const double> ys) {
  const auto f = p.joint_cdf();
  const auto px = p.source().positions();
  const auto py = p.target().positions();
  std::vector<double> out(xs.size() * ys.size(), 0.0);
  for (std::size_t a = 0; a < xs.size(); ++a) {
    auto ix = std::upper_bound(px.begin(), px.end(), xs[a]) - px.begin();
    if (ix == 0) continue;
    for (std::size_t b = 0; b < ys.size(); ++b) {
      auto iy = std::upper_bound(py.begin(), py.end(), ys[b]) - py.begin();
      if (iy == 0) continue;
      out[a * ys.size() + b] = f[static_cast<std::size_t>(ix - 1) * p.cols() + static_cast<std::size_t>(iy - 1)];
    }
  }
  return out;
}

std::vector<double> merged(std::span<const double> a, std::span<const double> b) {
  std::vector<double> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace

double joint_cdf_distance(const Coupling& p, const Coupling& q) {
  if (same_atoms(p.source(), q.source(), 0.0) && same_atoms(p.target(), q.target(), 0.0)) {
    const auto fp = p.joint_cdf();
    const auto fq = q.joint_cdf();
    return kernels::omp::max_abs_diff(fp, fq);
  }
  const auto xs = merged(p.source().positions(), q.source().positions());
  const auto ys = merged(p.target().positions(), q.target().positions());
  return kernels::omp::max_abs_diff(joint_cdf_on(p, xs, ys), joint_cdf_on(q, xs, ys));
}

bool approx_equal(const Coupling& p, const Coupling& q, double tol) {
  return joint_cdf_distance(p, q) <= tol;
}

}  // namespace mqt
