#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "mqt/kernels.hpp"
#include "support.hpp"

namespace k = mqt::kernels;

namespace {

std::vector<double> random_matrix(testing::Rng& rng, std::size_t n, double zeros) {
  std::vector<double> m(n);
  for (auto& v : m) v = rng.coin(zeros) ? 0.0 : rng.unit();
  return m;
}

}  // namespace

TEST_CASE("parallel kernels agree with the serial reference") {
  testing::Rng rng(81);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 1 + rng.index(40), m = 1 + rng.index(40), l = 1 + rng.index(40);
    const auto p = random_matrix(rng, n * m, 0.5);
    const auto q = random_matrix(rng, m * l, 0.5);
    std::vector<double> mid(m);
    for (auto& v : mid) v = 0.1 + rng.unit();

    const auto a = k::serial::compose(p, n, m, q, l, mid);
    const auto b = k::omp::compose(p, n, m, q, l, mid);
    CHECK(k::serial::max_abs_diff(a, b) <= 1e-13);

    const auto ca = k::serial::joint_cdf(p, n, m);
    const auto cb = k::omp::joint_cdf(p, n, m);
    CHECK(ca == cb);
    CHECK(ca.back() == doctest::Approx(k::serial::reduce_sum(p.size(), [&](std::size_t i) { return p[i]; })));

    CHECK(k::omp::max_abs_diff(a, b) == k::serial::max_abs_diff(a, b));
    CHECK(k::omp::max_abs_diff(ca, p) == k::serial::max_abs_diff(ca, p));

    const auto f = [&](std::size_t i) { return std::sin(static_cast<double>(i)) * p[i % p.size()]; };
    const std::size_t len = rng.index(5000);
    CHECK(k::omp::reduce_sum(len, f) == doctest::Approx(k::serial::reduce_sum(len, f)).epsilon(1e-12).scale(1.0));

    std::vector<int> hit(len, 0);
    k::omp::for_each_index(len, [&](std::size_t i) { hit[i] += 1; });
    CHECK(std::all_of(hit.begin(), hit.end(), [](int h) { return h == 1; }));
  }
}

TEST_CASE("reduce_sum does not depend on the thread count") {
  const auto f = [](std::size_t i) { return 1.0 / (1.0 + static_cast<double>(i)); };
  const double ref = k::omp::reduce_sum(100003, f);
#ifdef _OPENMP
  const int saved = omp_get_max_threads();
  for (int threads : {1, 2, 3, 8}) {
    omp_set_num_threads(threads);
    CHECK(k::omp::reduce_sum(100003, f) == ref);
  }
  omp_set_num_threads(saved);
#endif
  CHECK(k::omp::reduce_sum(0, f) == 0.0);
  CHECK(k::omp::reduce_sum(3, f) == 1.0 + 0.5 + 1.0 / 3);
  CHECK(k::thread_count() >= 1);
}
