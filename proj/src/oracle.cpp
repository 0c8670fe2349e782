#include "mqt/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <string>

#include "mqt/errors.hpp"
#include "mqt/kernels.hpp"

namespace mqt::oracle {

PermutationCost min_cost_over_permutations(const AtomicMeasure& mu, const AtomicMeasure& nu) {
  const std::size_t n = mu.size();
  if (n > 7) throw ResourceError("permutation oracle limited to 7 atoms");
  if (nu.size() != n) throw PreconditionError("permutation oracle needs equally many atoms");
  const double w = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(mu.mass(i) - w) > kMassTol || std::abs(nu.mass(i) - w) > kMassTol)
      throw PreconditionError("permutation oracle needs equal masses 1/n");

  std::vector<std::size_t> sigma(n);
  std::iota(sigma.begin(), sigma.end(), 0);
  PermutationCost best{INFINITY, sigma};
  do {
    double c = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = nu.position(sigma[i]) - mu.position(i);
      c += d * d;
    }
    c *= w;
    if (c < best.cost) best = {c, sigma};
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  return best;
}

std::vector<double> markovize_middle(const std::vector<AtomicMeasure>& marginals,
                                     std::span<const double> tensor) {
  if (marginals.size() != 3) throw PreconditionError("three marginals expected");
  const std::size_t n1 = marginals[0].size(), n2 = marginals[1].size(), n3 = marginals[2].size();
  if (tensor.size() != n1 * n2 * n3) throw PreconditionError("tensor size does not match marginals");
  std::vector<double> p12(n1 * n2, 0.0), p23(n2 * n3, 0.0), mid(n2, 0.0);
  for (std::size_t i = 0; i < n1; ++i)
    for (std::size_t j = 0; j < n2; ++j)
      for (std::size_t k = 0; k < n3; ++k) {
        const double v = tensor[(i * n2 + j) * n3 + k];
        p12[i * n2 + j] += v;
        p23[j * n3 + k] += v;
        mid[j] += v;
      }
  std::vector<double> out(tensor.size(), 0.0);
  for (std::size_t i = 0; i < n1; ++i)
    for (std::size_t j = 0; j < n2; ++j) {
      if (mid[j] <= 0.0) continue;
      for (std::size_t k = 0; k < n3; ++k)
        out[(i * n2 + j) * n3 + k] = p12[i * n2 + j] * p23[j * n3 + k] / mid[j];
    }
  return out;
}

namespace {

// All compositions of m into `parts` nonnegative integers.
std::vector<std::vector<int>> compositions(int m, std::size_t parts) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(parts, 0);
  auto rec = [&](auto&& self, std::size_t pos, int left) -> void {
    if (pos + 1 == parts) {
      cur[pos] = left;
      out.push_back(cur);
      return;
    }
    for (int v = 0; v <= left; ++v) {
      cur[pos] = v;
      self(self, pos + 1, left - v);
    }
  };
  rec(rec, 0, m);
  return out;
}

// Row a is below row b in the stochastic order: every partial sum of a is at
// least the partial sum of b.
bool row_sto_leq(const std::vector<int>& a, const std::vector<int>& b) {
  int sa = 0, sb = 0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    sa += a[j];
    sb += b[j];
    if (sa < sb) return false;
  }
  return true;
}

std::vector<Kernel> enumerate_kernels(const AtomicMeasure& from, const AtomicMeasure& to, int m,
                                      std::size_t cap) {
  constexpr double tol = 1e-9;
  const auto rows = compositions(m, to.size());
  const std::size_t n1 = from.size(), n2 = to.size();
  std::vector<std::size_t> choice(n1);
  std::vector<double> colsum(n2, 0.0);
  std::vector<Kernel> out;
  auto rec = [&](auto&& self, std::size_t i) -> void {
    if (i == n1) {
      for (std::size_t j = 0; j < n2; ++j)
        if (std::abs(colsum[j] - to.mass(j)) > tol) return;
      std::vector<double> mat(n1 * n2);
      for (std::size_t a = 0; a < n1; ++a)
        for (std::size_t j = 0; j < n2; ++j) mat[a * n2 + j] = rows[choice[a]][j] / static_cast<double>(m);
      if (out.size() >= cap) throw ResourceError("enumerated kernel family exceeds its cap");
      out.emplace_back(std::vector<double>(from.positions().begin(), from.positions().end()), to,
                       std::move(mat));
      return;
    }
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (i > 0 && !row_sto_leq(rows[choice[i - 1]], rows[r])) continue;
      bool ok = true;
      for (std::size_t j = 0; j < n2 && ok; ++j)
        ok = colsum[j] + from.mass(i) * rows[r][j] / m <= to.mass(j) + tol;
      if (!ok) continue;
      choice[i] = r;
      for (std::size_t j = 0; j < n2; ++j) colsum[j] += from.mass(i) * rows[r][j] / m;
      self(self, i + 1);
      for (std::size_t j = 0; j < n2; ++j) colsum[j] -= from.mass(i) * rows[r][j] / m;
    }
  };
  rec(rec, 0);
  return out;
}

}  // namespace

EnumeratedChainFamily::EnumeratedChainFamily(const MarginalCurve& c, TimePartition grid, int m,
                                             std::size_t max_chains)
    : grid_(std::move(grid)), m_(m) {
  if (grid_.size() > 3) throw PreconditionError("enumerated families use at most three times");
  if (m < 1) throw PreconditionError("simplex mesh needs m >= 1");
  for (double t : grid_.times()) marginals_.push_back(c.marginal_at(t));
  for (std::size_t k = 0; k + 1 < grid_.size(); ++k) {
    kernels_.push_back(enumerate_kernels(marginals_[k], marginals_[k + 1], m, max_chains));
    if (kernels_.back().empty())
      throw PreconditionError("no admissible kernel on the mesh for transition " + std::to_string(k));
  }
  if (size() > max_chains) throw ResourceError("enumerated chain family exceeds its cap");
}

std::size_t EnumeratedChainFamily::size() const {
  std::size_t n = 1;
  for (const auto& ks : kernels_) n *= ks.size();
  return n;
}

GridPathLaw EnumeratedChainFamily::chain(std::size_t index) const {
  if (index >= size()) throw PreconditionError("chain index out of range");
  std::vector<Kernel> ks;
  for (std::size_t k = kernels_.size(); k-- > 0;) {
    ks.push_back(kernels_[k][index % kernels_[k].size()]);
    index /= kernels_[k].size();
  }
  std::reverse(ks.begin(), ks.end());
  return GridPathLaw(grid_, ChainLaw(marginals_.front(), std::move(ks)), Interpolation::quantile_follow);
}

AtomicMeasure conditional_law(const GridPathLaw& l, double s, double t, double x) {
  const auto& g = l.grid();
  const std::size_t i = g.index_of(s), j = g.index_of(t);
  if (i >= g.size() || j >= g.size() || i >= j)
    throw PreconditionError("conditional law needs grid times s < t");
  const Coupling p = joint_of(l).two_time(i, j);
  std::vector<double> w(p.cols(), 0.0);
  double total = 0.0;
  for (std::size_t a = 0; a < p.rows() && p.source().position(a) <= x; ++a)
    for (std::size_t b = 0; b < p.cols(); ++b) {
      w[b] += p(a, b);
      total += p(a, b);
    }
  if (!(total > 0.0)) throw PreconditionError("conditioning event {X_s <= x} has no mass");
  return AtomicMeasure::from_weights(p.target().positions(), w);
}

ProbeResult sto_min_probe(const GridPathLaw& candidate, const EnumeratedChainFamily& fam, double s,
                          double t, double x, double tol) {
  for (double u : {s, t}) {
    const std::size_t a = candidate.grid().index_of(u), b = fam.grid().index_of(u);
    if (a >= candidate.grid().size() || b >= fam.grid().size())
      throw PreconditionError("probe times must be grid times of both laws");
    if (!same_atoms(candidate.marginal(a), fam.marginals()[b], 1e-9))
      throw PreconditionError("candidate and family have different marginals");
  }
  const AtomicMeasure ref = conditional_law(candidate, s, t, x);
  const std::size_t n = fam.size();
  std::vector<char> bad(n, 0);
  std::vector<std::exception_ptr> errors(n);
  kernels::omp::for_each_index(n, [&](std::size_t k) {
    try {
      bad[k] = !sto_leq(ref, conditional_law(fam.chain(k), s, t, x), tol);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  });
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  ProbeResult out;
  out.checked = n;
  for (std::size_t k = 0; k < n; ++k)
    if (bad[k]) out.violations.push_back(k);
  out.minimal = out.violations.empty();
  return out;
}

bool sto_min_probe(const MarginalCurve& c, const EnumeratedChainFamily& fam, double s, double t,
                   double x, const MQConfig& cfg) {
  return sto_min_probe(mq_chain(c, fam.grid(), cfg), fam, s, t, x).minimal;
}

}  // namespace mqt::oracle
