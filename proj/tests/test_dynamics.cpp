#include <doctest.h>

#include <cmath>

#include "mqt/dynamics.hpp"
#include "mqt/errors.hpp"
#include "mqt/markov_quantile.hpp"
#include "support.hpp"

using namespace mqt;

namespace {

const TimePartition kHalf({0.0, 0.5, 1.0});
const TimePartition kUnit({0.0, 1.0});

}  // namespace

TEST_CASE("action_chord examples") {
  CHECK(action_chord(quantile_law(MarginalCurve::constant(8), kHalf)) == 0.0);
  CHECK(action_chord(q_markovized(MarginalCurve::split_merge(8), kHalf, kHalf)) ==
        doctest::Approx(1.0).epsilon(1e-15));
  CHECK(action_chord(mq_chain(MarginalCurve::translation(8), kUnit)) == doctest::Approx(1.0).epsilon(1e-15));
  // Joint and chain forms of the same law agree.
  const auto ch = mq_chain(MarginalCurve::scaling(8), TimePartition::uniform(0.0, 1.0, 4));
  const GridPathLaw expanded(ch.grid(), joint_of(ch), Interpolation::quantile_follow);
  CHECK(action_chord(expanded) == doctest::Approx(action_chord(ch)).epsilon(1e-13));
}

TEST_CASE("action examples and the energy lower bound") {
  const auto tr = MarginalCurve::translation(16);
  CHECK(action(tr, quantile_law(tr, kUnit), 1e-10).value == doctest::Approx(1.0).epsilon(1e-12));
  const auto mp = MarginalCurve::moving_point(16);
  const auto rep = action(mp, quantile_law(mp, kUnit), 1e-9);
  CHECK(rep.converged);
  CHECK(std::abs(rep.value - 4.0 / 3.0) < 1e-6);

  testing::Rng rng(61);
  for (int trial = 0; trial < 20; ++trial) {
    const auto c = testing::presets(8)[rng.index(5)];
    const auto r = testing::random_partition(rng, 1 + rng.index(3));
    const auto l = rng.coin() ? q_markovized(c, r, r) : mq_chain(c, r);
    CHECK(action(c, l, 1e-8).value >= energy_partition(c, r) - 1e-9);
  }

  // Without a recorded origin there is nothing to refine.
  const GridPathLaw bare(kUnit, quantile_law(tr, kUnit).joint(), Interpolation::quantile_follow);
  CHECK_THROWS_AS(action(tr, bare, 1e-8), PreconditionError);
}

TEST_CASE("displacement interpolation examples") {
  const auto tr = MarginalCurve::translation(8);
  const auto d = disp_construct(tr, kUnit);
  CHECK(d.interpolation() == Interpolation::linear);
  for (double t : {0.1, 0.5, 0.77}) CHECK(w2(linear_marginal(d, t), tr.marginal_at(t)) < 1e-12);
  CHECK(action(tr, d, 1e-12).value == doctest::Approx(1.0).epsilon(1e-14));

  const auto sm = MarginalCurve::split_merge(8);
  const auto ds = disp_construct(sm, kHalf);
  const auto j = joint_of(ds);
  CHECK(j.n_paths() == 4);
  const auto m = linear_marginal(ds, 0.75);
  REQUIRE(m.size() == 2);
  CHECK(m.position(0) == doctest::Approx(-0.25));
  CHECK(m.position(1) == doctest::Approx(0.25));
  // Between 1/4 and 3/4 the branches meet and separate independently.
  const auto p = linear_two_time(ds, 0.25, 0.75);
  CHECK(p.rows() == 2);
  for (double v : p.mass()) CHECK(v == doctest::Approx(0.25));

  CHECK_THROWS_AS(linear_marginal(quantile_law(sm, kHalf), 0.3), PreconditionError);
}

TEST_CASE("chord action of the displacement law equals the partition energy") {
  testing::Rng rng(62);
  for (int trial = 0; trial < 40; ++trial) {
    const auto c = rng.coin() ? testing::presets(16)[rng.index(5)] : testing::random_grid_curve(rng);
    const auto r = testing::random_partition(rng, rng.index(5));
    CHECK(std::abs(action_chord(disp_construct(c, r)) - energy_partition(c, r)) <= 1e-9);
  }
}

TEST_CASE("velocity field examples") {
  const auto tr = velocity_field(MarginalCurve::translation(16), 1e-4);
  for (const auto& [x, v] : tr.on_support(0.3)) CHECK(v == doctest::Approx(1.0).epsilon(1e-9));
  for (const auto& [x, v] : tr.on_support(0.0)) CHECK(v == doctest::Approx(1.0).epsilon(1e-9));

  const auto mp = velocity_field(MarginalCurve::moving_point(16), 1e-4);
  CHECK(mp(0.5, 0.25) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(mp(1.0, 1.0) == doctest::Approx(2.0).epsilon(1e-3));

  const auto cst = velocity_field(MarginalCurve::constant(16), 1e-4);
  for (const auto& [x, v] : cst.on_support(0.6)) CHECK(v == 0.0);

  CHECK_THROWS_AS(mp(0.5, 0.3), DomainError);
  CHECK_THROWS_AS(velocity_field(MarginalCurve::constant(4), 0.0), PreconditionError);
}

TEST_CASE("barycentric velocity examples") {
  const auto tr = MarginalCurve::translation(16);
  const auto d = disp_construct(tr, TimePartition::uniform(0.0, 1.0, 4));
  for (double t : {0.0, 0.3, 0.5}) {
    const auto b = barycentric_velocity(d, t);
    for (double u : b.velocities) CHECK(u == doctest::Approx(1.0).epsilon(1e-12));
  }

  const auto ds = disp_construct(MarginalCurve::split_merge(8), kHalf);
  const auto b = barycentric_velocity(ds, 0.75);
  REQUIRE(b.positions.size() == 2);
  CHECK(b.velocities[0] == doctest::Approx(-1.0));
  CHECK(b.velocities[1] == doctest::Approx(1.0));
  CHECK(b.masses[0] == doctest::Approx(0.5));

  // Two crossing straight lines: the slopes cancel where they meet.
  const std::vector<std::uint32_t> states{0, 1, 1, 0};
  const std::vector<double> masses{0.5, 0.5};
  const GridPathLaw cross(kUnit, JointLaw::from_paths({{-1.0, 1.0}, {-1.0, 1.0}}, states, masses),
                          Interpolation::linear);
  const auto bc = barycentric_velocity(cross, 0.5);
  REQUIRE(bc.positions.size() == 1);
  CHECK(bc.positions[0] == doctest::Approx(0.0));
  CHECK(bc.velocities[0] == doctest::Approx(0.0));

  const auto ql = quantile_law(tr, kHalf);
  CHECK(barycentric_velocity(ql, 0.5).velocities.size() == 16);
  CHECK_THROWS_AS(barycentric_velocity(ql, 0.3), PreconditionError);
}

TEST_CASE("test functions") {
  const TestFunction phi{{1.0, -2.0, 0.5, 0.25}, 0.2, 0.8};
  CHECK(phi.value(0.3, 0.2) == 0.0);
  CHECK(phi.value(0.3, 0.9) == 0.0);
  CHECK(phi.value(0.0, 0.5) == doctest::Approx(1.0));
  const double h = 1e-6;
  for (double x : {-0.5, 0.0, 0.7})
    for (double t : {0.3, 0.5, 0.71}) {
      CHECK(phi.dt(x, t) == doctest::Approx((phi.value(x, t + h) - phi.value(x, t - h)) / (2 * h)).epsilon(1e-6));
      CHECK(phi.dx(x, t) == doctest::Approx((phi.value(x + h, t) - phi.value(x - h, t)) / (2 * h)).epsilon(1e-6));
    }
  CHECK(test_function_library().size() == 6);
  const auto a = random_test_function(5), b = random_test_function(5);
  CHECK(a.coeffs == b.coeffs);
  CHECK(a.t_lo > 0.0);
  CHECK(a.t_hi < 1.0);
  CHECK(a.t_lo < a.t_hi);
}

TEST_CASE("continuity equation residuals") {
  const auto cst = MarginalCurve::constant(32);
  for (const auto& phi : test_function_library())
    CHECK(std::abs(continuity_residual(cst, velocity_field(cst, 1e-4), phi, 1000)) < 1e-5);

  for (const auto& c : {MarginalCurve::translation(64), MarginalCurve::moving_point(64)}) {
    const auto v = velocity_field(c, 1e-4);
    for (const auto& phi : test_function_library()) CHECK(std::abs(continuity_residual(c, v, phi, 1000)) <= 1e-3);
    CHECK(kinetic_energy(c, v, 1000) >= energy(c, 1e-8).value - 1e-5);
  }

  const auto tr = MarginalCurve::translation(64);
  const TestFunction phi{{0.0, 1.0, 0.0, 0.0}, 0.1, 0.9};
  CHECK(std::abs(continuity_residual_with(tr, [](double, double) { return 0.0; }, phi, 1000)) >= 0.1);
  CHECK(kinetic_energy(tr, velocity_field(tr, 1e-4), 1000) == doctest::Approx(1.0).epsilon(1e-9));
}
