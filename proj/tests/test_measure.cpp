#include <doctest.h>

#include <cmath>
#include <limits>

#include "mqt/coupling.hpp"
#include "mqt/errors.hpp"
#include "mqt/measure.hpp"
#include "support.hpp"

using mqt::AtomicMeasure;

namespace {

AtomicMeasure two(double a, double b) { return AtomicMeasure({a, b}, {0.5, 0.5}); }

// Definitional quantile by scanning every atom.
double scan_quantile(const AtomicMeasure& mu, double alpha) {
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const double below = mu.cumulative(i);
    const double above = 1.0 - (i == 0 ? 0.0 : mu.cumulative(i - 1));
    if (below >= alpha && above >= 1.0 - alpha) return mu.position(i);
  }
  return NAN;
}

}  // namespace

TEST_CASE("construction sorts, merges duplicates and validates mass") {
  const AtomicMeasure mu({2.0, 0.0, 2.0}, {0.25, 0.5, 0.25});
  REQUIRE(mu.size() == 2);
  CHECK(mu.position(0) == 0.0);
  CHECK(mu.position(1) == 2.0);
  CHECK(mu.mass(1) == doctest::Approx(0.5));
  CHECK(mu.cumulative(1) == 1.0);

  const AtomicMeasure z({-0.0, 0.0}, {0.5, 0.5});
  CHECK(z.size() == 1);
  CHECK_FALSE(std::signbit(z.position(0)));

  CHECK_THROWS_AS(AtomicMeasure({}, {}), mqt::PreconditionError);
  CHECK_THROWS_AS(AtomicMeasure({0.0, 1.0}, {1.0}), mqt::PreconditionError);
  CHECK_THROWS_AS(AtomicMeasure({0.0, 1.0}, {1.0, 1e-16}), mqt::PreconditionError);
  CHECK_THROWS_AS(AtomicMeasure({0.0, 1.0}, {0.5, 0.49}), mqt::PreconditionError);
  CHECK_THROWS_AS(AtomicMeasure({NAN}, {1.0}), mqt::PreconditionError);
  CHECK_THROWS_AS(AtomicMeasure({0.0, 1.0}, {1.5, -0.5}), mqt::PreconditionError);
}

TEST_CASE("from_weights normalizes and drops negligible weights") {
  const std::vector<double> x{0.0, 1.0, 2.0};
  const std::vector<double> w{2.0, 1e-20, 6.0};
  const auto mu = AtomicMeasure::from_weights(x, w);
  REQUIRE(mu.size() == 2);
  CHECK(mu.mass(0) == doctest::Approx(0.25));
  CHECK(mu.position(1) == 2.0);
}

TEST_CASE("quantile follows the two-sided minimum") {
  CHECK(mqt::quantile(AtomicMeasure::dirac(0.0), 0.3) == 0.0);
  CHECK(mqt::quantile(two(0.0, 1.0), 0.5) == 0.0);
  CHECK(mqt::quantile(two(0.0, 1.0), 0.6) == 1.0);
  CHECK_THROWS_AS(mqt::quantile(two(0.0, 1.0), 0.0), mqt::DomainError);
  CHECK_THROWS_AS(mqt::quantile(two(0.0, 1.0), 1.0), mqt::DomainError);
  CHECK_THROWS_AS(mqt::quantile(two(0.0, 1.0), NAN), mqt::DomainError);
}

TEST_CASE("quantile agrees with the exhaustive scan and is monotone") {
  testing::Rng rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const auto mu = testing::random_measure(rng, 7, rng.coin());
    double prev = -INFINITY;
    for (int k = 1; k < 50; ++k) {
      const double a = k / 50.0;
      const double q = mqt::quantile(mu, a);
      CHECK(q == scan_quantile(mu, a));
      CHECK(q >= prev);
      prev = q;
    }
    // At every cumulative level the quantile is the atom itself.
    for (std::size_t i = 0; i + 1 < mu.size(); ++i) CHECK(mqt::quantile(mu, mu.cumulative(i)) == mu.position(i));
    const mqt::QuantileFunction qf(mu);
    for (int k = 1; k < 20; ++k) CHECK(qf(k / 20.0) == mqt::quantile(mu, k / 20.0));
  }
}

TEST_CASE("cdf is right-continuous") {
  const auto d = AtomicMeasure::dirac(0.0);
  CHECK(mqt::cdf(d, -1.0) == 0.0);
  CHECK(mqt::cdf(d, 0.0) == 1.0);
  CHECK(mqt::cdf_left(d, 0.0) == 0.0);
  CHECK(mqt::cdf(two(0.0, 1.0), 0.5) == 0.5);
}

TEST_CASE("stochastic order") {
  const auto d0 = AtomicMeasure::dirac(0.0), d1 = AtomicMeasure::dirac(1.0);
  CHECK(mqt::sto_leq(d0, d1));
  CHECK_FALSE(mqt::sto_leq(d1, d0));
  CHECK(mqt::sto_leq(two(0.0, 2.0), two(1.0, 2.0)));
  CHECK_FALSE(mqt::sto_leq(two(1.0, 2.0), two(0.0, 2.0)));
}

TEST_CASE("stochastic order is antisymmetric up to equality") {
  testing::Rng rng(12);
  int both = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const auto mu = testing::random_measure(rng, 3);
    const auto nu = rng.coin(0.2) ? mu : testing::random_measure(rng, 3);
    const bool eq = mqt::sto_leq(mu, nu) && mqt::sto_leq(nu, mu);
    CHECK(eq == mqt::approx_equal(mu, nu));
    both += eq;
  }
  CHECK(both > 0);
}

TEST_CASE("w2 examples") {
  CHECK(mqt::w2(AtomicMeasure::dirac(0.0), AtomicMeasure::dirac(1.0)) == doctest::Approx(1.0).epsilon(1e-15));
  const auto mu = AtomicMeasure({0.0, 1.0, 5.0}, {0.2, 0.3, 0.5});
  CHECK(mqt::w2(mu, mu) == 0.0);
  CHECK(mqt::w2(two(0.0, 1.0), two(2.0, 3.0)) == doctest::Approx(2.0).epsilon(1e-15));
  // Unequal masses: {0:1/2, 1:1/2} against {0:1/3, 1:2/3} moves 1/6 by one.
  CHECK(mqt::w2(two(0.0, 1.0), AtomicMeasure({0.0, 1.0}, {1.0 / 3, 2.0 / 3})) ==
        doctest::Approx(std::sqrt(1.0 / 6.0)).epsilon(1e-14));
}

TEST_CASE("w2 is a metric on sampled triples") {
  testing::Rng rng(13);
  for (int trial = 0; trial < 300; ++trial) {
    const auto a = testing::random_measure(rng, 6, false);
    const auto b = testing::random_measure(rng, 6, false);
    const auto c = testing::random_measure(rng, 6, false);
    CHECK(mqt::w2(a, b) == doctest::Approx(mqt::w2(b, a)).epsilon(1e-14));
    CHECK(mqt::w2(a, c) <= mqt::w2(a, b) + mqt::w2(b, c) + 1e-9);
    CHECK(mqt::w2(a, a) == 0.0);
  }
}

TEST_CASE("quantile coupling examples") {
  const auto q1 = mqt::quantile_coupling(AtomicMeasure::dirac(0.0), AtomicMeasure::dirac(1.0));
  CHECK(q1.rows() == 1);
  CHECK(q1(0, 0) == 1.0);

  const auto q2 = mqt::quantile_coupling(two(0.0, 1.0), two(2.0, 3.0));
  CHECK(q2(0, 0) == 0.5);
  CHECK(q2(0, 1) == 0.0);
  CHECK(q2(1, 0) == 0.0);
  CHECK(q2(1, 1) == 0.5);
  CHECK(q2.cost() == doctest::Approx(4.0).epsilon(1e-15));

  const auto q3 = mqt::quantile_coupling(AtomicMeasure::dirac(0.0), two(-1.0, 1.0));
  CHECK(q3(0, 0) == 0.5);
  CHECK(q3(0, 1) == 0.5);
}

TEST_CASE("quantile coupling has exact marginals and cost w2 squared") {
  testing::Rng rng(14);
  for (int trial = 0; trial < 300; ++trial) {
    const auto mu = testing::random_measure(rng, 8, rng.coin());
    const auto nu = testing::random_measure(rng, 8, rng.coin());
    const auto q = mqt::quantile_coupling(mu, nu);  // constructor checks both marginals to 1e-12
    const double w = mqt::w2(mu, nu);
    CHECK(q.cost() == doctest::Approx(w * w).epsilon(1e-12).scale(1.0));
    CHECK(mqt::increasing_kernel(q));
  }
}

TEST_CASE("quantization of a measure converges in CDF distance") {
  testing::Rng rng(15);
  for (int trial = 0; trial < 50; ++trial) {
    const auto mu = testing::random_measure(rng, 6, false);
    for (int K : {4, 16, 64, 256}) {
      std::vector<double> xs;
      for (int k = 1; k <= K; ++k) xs.push_back(mqt::quantile(mu, (k - 0.5) / K));
      const auto muK = AtomicMeasure::uniform(xs);
      CHECK(mqt::cdf_distance(muK, mu) <= 0.5 / K + 1e-12);
    }
  }
}
