#include <doctest.h>

#include <cmath>

#include "mqt/coupling.hpp"
#include "mqt/errors.hpp"
#include "support.hpp"

using mqt::AtomicMeasure;
using mqt::Coupling;

namespace {

AtomicMeasure two(double a, double b) { return AtomicMeasure({a, b}, {0.5, 0.5}); }

double max_entry_diff(const Coupling& p, const Coupling& q) {
  double d = 0.0;
  for (std::size_t k = 0; k < p.mass().size(); ++k) d = std::max(d, std::abs(p.mass()[k] - q.mass()[k]));
  return d;
}

}  // namespace

TEST_CASE("coupling construction validates marginals") {
  CHECK_THROWS_AS(Coupling(two(0, 1), two(0, 1), {0.5, 0.0, 0.0, 0.4}), mqt::PreconditionError);
  CHECK_THROWS_AS(Coupling(two(0, 1), two(0, 1), {0.6, -0.1, -0.1, 0.6}), mqt::PreconditionError);
  CHECK_THROWS_AS(Coupling(two(0, 1), two(0, 1), {0.5, 0.5}), mqt::PreconditionError);
  CHECK_NOTHROW(Coupling(two(0, 1), two(0, 1), {0.25, 0.25, 0.25, 0.25}));
}

TEST_CASE("kernel_of examples") {
  const auto id = mqt::kernel_of(Coupling::identity(two(0, 1)));
  CHECK(id.row(0).size() == 1);
  CHECK(id.row(0).position(0) == 0.0);
  CHECK(id.row(1).position(0) == 1.0);

  const auto ind = mqt::kernel_of(Coupling::independent(AtomicMeasure::dirac(0), two(-1, 1)));
  CHECK(ind(0, 0) == 0.5);
  CHECK(ind(0, 1) == 0.5);

  const auto q = mqt::kernel_of(mqt::quantile_coupling(two(0, 1), AtomicMeasure({0, 1}, {1.0 / 3, 2.0 / 3})));
  CHECK(q(0, 0) == doctest::Approx(2.0 / 3).epsilon(1e-15));
  CHECK(q(0, 1) == doctest::Approx(1.0 / 3).epsilon(1e-15));
  CHECK(q(1, 0) == 0.0);
  CHECK(q(1, 1) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("product examples") {
  const auto id = Coupling::identity(two(0, 1));
  CHECK(mqt::approx_equal(mqt::product(id, id), id));

  const auto pair = two(-0.5, 0.5);
  const auto d0 = AtomicMeasure::dirac(0.0);
  const auto funnel = mqt::product(mqt::quantile_coupling(pair, d0), mqt::quantile_coupling(d0, pair));
  for (double m : funnel.mass()) CHECK(m == doctest::Approx(0.25).epsilon(1e-15));

  testing::Rng rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const auto mu = testing::random_measure(rng), nu = testing::random_measure(rng);
    const auto p = testing::random_plan(rng, mu, nu);
    CHECK(max_entry_diff(mqt::product(p, Coupling::identity(nu)), p) < 1e-15);
    CHECK(max_entry_diff(mqt::product(Coupling::identity(mu), p), p) < 1e-15);
  }

  CHECK_THROWS_AS(mqt::product(id, Coupling::identity(two(0, 2))), mqt::PreconditionError);
  CHECK_THROWS_AS(mqt::product(id, Coupling::identity(AtomicMeasure({0, 1}, {0.4, 0.6}))), mqt::PreconditionError);
}

TEST_CASE("product is associative and preserves increasing kernels") {
  testing::Rng rng(22);
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = testing::random_measure(rng), b = testing::random_measure(rng);
    const auto c = testing::random_measure(rng), d = testing::random_measure(rng);
    const auto p = testing::random_plan(rng, a, b);
    const auto q = testing::random_plan(rng, b, c);
    const auto r = testing::random_plan(rng, c, d);
    CHECK(max_entry_diff(mqt::product(mqt::product(p, q), r), mqt::product(p, mqt::product(q, r))) < 1e-12);

    const auto pi = testing::random_increasing_plan(rng, a, b);
    const auto qi = testing::random_increasing_plan(rng, b, c);
    REQUIRE(mqt::increasing_kernel(pi));
    CHECK(mqt::increasing_kernel(mqt::product(pi, qi), 1e-12));
  }
}

TEST_CASE("concat examples and projections") {
  const auto id = Coupling::identity(two(0, 1));
  const auto t = mqt::concat(id, id);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t k = 0; k < 2; ++k) CHECK(t(i, j, k) == ((i == j && j == k) ? 0.5 : 0.0));

  const auto pair = two(-0.5, 0.5);
  const auto d0 = AtomicMeasure::dirac(0.0);
  const auto v = mqt::concat(mqt::quantile_coupling(pair, d0), mqt::quantile_coupling(d0, pair));
  CHECK(v.extent(1) == 1);
  for (double m : v.tensor()) CHECK(m == doctest::Approx(0.25).epsilon(1e-15));

  testing::Rng rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = testing::random_measure(rng), b = testing::random_measure(rng), c = testing::random_measure(rng);
    const auto p = testing::random_plan(rng, a, b);
    const auto q = testing::random_plan(rng, b, c);
    const auto tl = mqt::concat(p, q);
    CHECK(max_entry_diff(tl.project12(), p) < 1e-15);
    CHECK(max_entry_diff(tl.project23(), q) < 1e-15);
    CHECK(max_entry_diff(tl.project13(), mqt::product(p, q)) < 1e-15);
  }
  CHECK_THROWS_AS(mqt::concat(id, Coupling::identity(pair)), mqt::PreconditionError);
}

TEST_CASE("increasing kernel examples") {
  testing::Rng rng(24);
  for (int trial = 0; trial < 200; ++trial) {
    const auto mu = testing::random_measure(rng), nu = testing::random_measure(rng);
    CHECK(mqt::increasing_kernel(mqt::quantile_coupling(mu, nu)));
    CHECK(mqt::increasing_kernel(Coupling::independent(mu, nu)));
  }
  const Coupling anti(two(0, 1), two(0, 1), {0.0, 0.5, 0.5, 0.0});
  CHECK_FALSE(mqt::increasing_kernel(anti));
}

TEST_CASE("lower orthant order examples") {
  const auto mu = two(0, 1), nu = two(2, 3);
  const auto q = mqt::quantile_coupling(mu, nu);
  const auto ind = Coupling::independent(mu, nu);
  CHECK(mqt::lo_leq(q, q));
  CHECK(mqt::lo_leq(q, ind));
  CHECK_FALSE(mqt::lo_leq(ind, q));
  CHECK_THROWS_AS(mqt::lo_leq(q, Coupling::independent(mu, two(2, 4))), mqt::PreconditionError);
}

TEST_CASE("lower orthant order is a partial order with the comonotone plan on top") {
  testing::Rng rng(25);
  for (int trial = 0; trial < 300; ++trial) {
    const auto mu = testing::random_measure(rng, 4), nu = testing::random_measure(rng, 4);
    const auto p = testing::random_plan(rng, mu, nu);
    const auto q = rng.coin(0.2) ? p : testing::random_plan(rng, mu, nu);
    const auto r = testing::random_plan(rng, mu, nu);
    CHECK(mqt::lo_leq(p, p));
    CHECK(mqt::lo_leq(mqt::quantile_coupling(mu, nu), p, 1e-12));
    if (mqt::lo_leq(p, q) && mqt::lo_leq(q, p)) CHECK(mqt::joint_cdf_distance(p, q) <= 1e-12);
    if (mqt::lo_leq(p, q) && mqt::lo_leq(q, r)) CHECK(mqt::lo_leq(p, r));
  }
}

TEST_CASE("from_entries merges nearby positions") {
  const std::vector<Coupling::Entry> es{{0.0, 1.0, 0.25}, {1e-14, 1.0, 0.25}, {1.0, 2.0, 0.5}};
  const auto p = Coupling::from_entries(es);
  CHECK(p.rows() == 2);
  CHECK(p.cols() == 2);
  CHECK(p(0, 0) == doctest::Approx(0.5));
}

TEST_CASE("compose and coupling_of agree with product") {
  testing::Rng rng(26);
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = testing::random_measure(rng), b = testing::random_measure(rng), c = testing::random_measure(rng);
    const auto p = testing::random_plan(rng, a, b);
    const auto q = testing::random_plan(rng, b, c);
    const auto via_kernels = mqt::coupling_of(a, mqt::compose(mqt::kernel_of(p), mqt::kernel_of(q)));
    CHECK(mqt::joint_cdf_distance(via_kernels, mqt::product(p, q)) < 1e-12);
  }
}
