#pragma once

// Data-parallel inner loops shared by the transport modules.
//
// Every kernel exists twice: `serial::` is the plain reference loop kept for
// testing and benchmarking, `omp::` is the OpenMP version used by the library.
// Both produce identical results up to floating-point summation order.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mqt::kernels {

namespace serial {

// Product of two transport plans through their shared middle marginal:
// out(i,k) = sum_j p(i,j) q(j,k) / mid(j). `p` is n x m, `q` is m x l, both
// row-major.
inline std::vector<double> compose(std::span<const double> p, std::size_t n, std::size_t m,
                                   std::span<const double> q, std::size_t l,
                                   std::span<const double> mid) {
  std::vector<double> out(n * l, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double* row = out.data() + i * l;
    for (std::size_t j = 0; j < m; ++j) {
      const double pij = p[i * m + j];
      if (pij == 0.0) continue;
      const double w = pij / mid[j];
      const double* qrow = q.data() + j * l;
      for (std::size_t k = 0; k < l; ++k) row[k] += w * qrow[k];
    }
  }
  return out;
}

// Two-dimensional cumulative sums: out(i,j) = sum_{a<=i, b<=j} mass(a,b).
inline std::vector<double> joint_cdf(std::span<const double> mass, std::size_t n, std::size_t m) {
  std::vector<double> out(mass.begin(), mass.end());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 1; j < m; ++j) out[i * m + j] += out[i * m + j - 1];
  for (std::size_t i = 1; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) out[i * m + j] += out[(i - 1) * m + j];
  return out;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

template <class F>
double reduce_sum(std::size_t n, F&& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += f(i);
  return s;
}

template <class F>
void for_each_index(std::size_t n, F&& f) {
  for (std::size_t i = 0; i < n; ++i) f(i);
}

}  // namespace serial

namespace omp {

inline std::vector<double> compose(std::span<const double> p, std::size_t n, std::size_t m,
                                   std::span<const double> q, std::size_t l,
                                   std::span<const double> mid) {
  std::vector<double> out(n * l, 0.0);
  // Nonzero pattern of q, built once; quantile couplings have at most m+l-1
  // nonzeros so the inner loop runs over a short list.
  std::vector<std::size_t> start(m + 1, 0);
  std::vector<std::size_t> col;
  std::vector<double> val;
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t k = 0; k < l; ++k) {
      const double v = q[j * l + k];
      if (v != 0.0) {
        col.push_back(k);
        val.push_back(v / mid[j]);
      }
    }
    start[j + 1] = col.size();
  }
  const auto rows = static_cast<long long>(n);
#pragma omp parallel for schedule(static)
  for (long long ii = 0; ii < rows; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    double* row = out.data() + i * l;
    for (std::size_t j = 0; j < m; ++j) {
      const double pij = p[i * m + j];
      if (pij == 0.0) continue;
      for (std::size_t e = start[j]; e < start[j + 1]; ++e) row[col[e]] += pij * val[e];
    }
  }
  return out;
}

inline std::vector<double> joint_cdf(std::span<const double> mass, std::size_t n, std::size_t m) {
  std::vector<double> out(mass.begin(), mass.end());
  const auto rows = static_cast<long long>(n);
  const auto cols = static_cast<long long>(m);
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < rows; ++i)
    for (std::size_t j = 1; j < m; ++j) out[i * m + j] += out[i * m + j - 1];
#pragma omp parallel for schedule(static)
  for (long long j = 0; j < cols; ++j)
    for (std::size_t i = 1; i < n; ++i) out[i * m + j] += out[(i - 1) * m + j];
  return out;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  const auto n = static_cast<long long>(a.size());
#pragma omp parallel for reduction(max : d) schedule(static)
  for (long long i = 0; i < n; ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

// Sums over a fixed block layout so the result does not depend on the number
// of threads. `f` must not throw.
template <class F>
double reduce_sum(std::size_t n, F&& f) {
  constexpr std::size_t kBlocks = 256;
  const std::size_t blocks = std::min(n, kBlocks);
  if (blocks == 0) return 0.0;
  std::vector<double> partial(blocks, 0.0);
  const auto count = static_cast<long long>(blocks);
#pragma omp parallel for schedule(dynamic)
  for (long long b = 0; b < count; ++b) {
    const std::size_t lo = n * static_cast<std::size_t>(b) / blocks;
    const std::size_t hi = n * (static_cast<std::size_t>(b) + 1) / blocks;
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += f(i);
    partial[static_cast<std::size_t>(b)] = s;
  }
  double s = 0.0;
  for (double v : partial) s += v;
  return s;
}

// `f` must not throw; exceptions cannot cross the parallel region.
template <class F>
void for_each_index(std::size_t n, F&& f) {
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < count; ++i) f(static_cast<std::size_t>(i));
}

}  // namespace omp

inline int thread_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace mqt::kernels
