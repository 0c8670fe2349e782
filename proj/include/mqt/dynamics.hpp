#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "mqt/coupling.hpp"
#include "mqt/curve.hpp"
#include "mqt/markov_quantile.hpp"
#include "mqt/process.hpp"

namespace mqt {

/// Expected chord energy of a law on its own grid:
/// sum_k sum_{i,j} mass_k(i,j) (x_j - x_i)^2 / (r_{k+1} - r_k).
double action_chord(const GridPathLaw& l);

/// Action of a law whose path reconstruction is known. Linear laws are exact
/// on their defining partition. Quantile-following laws are rebuilt on
/// dyadically refined grids (curve special times forced in) until two
/// successive chord actions differ by less than `tol`. Throws
/// PreconditionError for quantile-following laws without a known origin.
RefinementReport action(const MarginalCurve& c, const GridPathLaw& l, double tol,
                        const RefinementOptions& opts = {});

/// The interpolating process for partition `r`: a chain on `r` with quantile
/// coupling transitions, linearly interpolated between partition times.
GridPathLaw disp_construct(const MarginalCurve& c, const TimePartition& r);

/// Law at time t of a linearly interpolated law.
AtomicMeasure linear_marginal(const GridPathLaw& l, double t);
/// Two-time coupling (s < t) of a linearly interpolated law.
Coupling linear_two_time(const GridPathLaw& l, double s, double t);

/// Velocity of the quantized curve: v(t, x) is the mean over the levels that
/// make up the atom x of the central difference
/// (G(t+dt, a) - G(t-dt, a)) / (2 dt), one-sided near 0 and 1.
class VelocityField {
 public:
  VelocityField(MarginalCurve curve, double dt);

  /// Throws DomainError when x is not an atom of mu_t.
  double operator()(double t, double x) const;
  /// (position, velocity) for every atom of mu_t.
  std::vector<std::pair<double, double>> on_support(double t) const;
  double dt() const { return dt_; }

 private:
  std::vector<double> level_velocities(double t) const;

  MarginalCurve curve_;
  double dt_;
};

VelocityField velocity_field(const MarginalCurve& c, double dt);

/// Conditional mean chord slope given the position at time t.
struct BarycentricField {
  std::vector<double> positions;
  std::vector<double> velocities;
  std::vector<double> masses;
};

/// Barycentric projection of the chord slopes of `l` at time t. At grid
/// times the right slope is used. Positions between grid times are linear
/// interpolations, so quantile-following laws only accept grid times.
BarycentricField barycentric_velocity(const GridPathLaw& l, double t);

/// phi(x, t) = p(x) b(t) with p a cubic and b a C^2 bump supported on
/// [t_lo, t_hi] inside (0,1), b = (4 u (1 - u))^3 with u the rescaled time.
struct TestFunction {
  std::array<double, 4> coeffs{};  // p(x) = c0 + c1 x + c2 x^2 + c3 x^3
  double t_lo = 0.1;
  double t_hi = 0.9;

  double value(double x, double t) const;
  double dt(double x, double t) const;
  double dx(double x, double t) const;
};

/// Six fixed instances.
std::vector<TestFunction> test_function_library();
/// Random cubic coefficients in [-1,1] and bump window inside (0,1).
TestFunction random_test_function(std::uint64_t seed);

/// Midpoint-rule estimate over `steps` time cells of
/// int_0^1 sum_x mu_t(x) (d_t phi + v d_x phi) dt.
double continuity_residual(const MarginalCurve& c, const VelocityField& v, const TestFunction& phi,
                           std::size_t steps);
/// Same with a caller-supplied field.
template <class Field>
double continuity_residual_with(const MarginalCurve& c, Field&& v, const TestFunction& phi,
                                std::size_t steps);

/// Midpoint-rule estimate of int_0^1 sum_x mu_t(x) v(t,x)^2 dt.
double kinetic_energy(const MarginalCurve& c, const VelocityField& v, std::size_t steps);

}  // namespace mqt

#include "mqt/kernels.hpp"

namespace mqt {

template <class Field>
double continuity_residual_with(const MarginalCurve& c, Field&& v, const TestFunction& phi,
                                std::size_t steps) {
  const double h = 1.0 / static_cast<double>(steps);
  return kernels::omp::reduce_sum(steps, [&](std::size_t j) {
    const double t = (static_cast<double>(j) + 0.5) * h;
    const auto mu = c.marginal_at(t);
    double s = 0.0;
    for (std::size_t a = 0; a < mu.size(); ++a) {
      const double x = mu.position(a);
      s += mu.mass(a) * (phi.dt(x, t) + v(t, x) * phi.dx(x, t));
    }
    return s * h;
  });
}

}  // namespace mqt
