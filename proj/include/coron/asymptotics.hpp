#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "coron/dimension.hpp"
#include "coron/types.hpp"

namespace coron {

/// Radial projection of a bubble centered at the hole of the annulus rho0 < s < R:
/// PU = U + h with h(s) = A + B s^{2-N} harmonic and PU(rho0) = PU(R) = 0.
struct RadialProjection {
  Dims dims;
  double delta = 0;
  double rho0 = 0;
  double R = 0;
  double A = 0;
  double B = 0;

  double U(double s) const;
  double h(double s) const { return A + B * std::pow(s, 2 - dims.N); }
  /// Evaluated as (U(s) - U(R)) - (U(rho0) - U(R)) w(s) with w harmonic, w(rho0) = 1, w(R) = 0,
  /// so both boundary values are exact zeros in floating point.
  double PU(double s) const;
  /// -Delta PU - U^p from analytic radial derivatives.
  double pde_residual(double s) const;
};

RadialProjection project_bubble_radial(const Dims& dims, double rho0, double R, double delta);

struct ProjectionBoundsReport {
  double min_pu = 0;         // min PU over the samples
  double max_excess = 0;     // max (PU - U)
  double max_pde_residual = 0;  // relative to U^p
  double boundary_inner = 0;
  double boundary_outer = 0;
  int samples = 0;
};

/// Maximum principle 0 <= PU <= U and the PDE check on `samples` geometric radii.
ProjectionBoundsReport projection_bounds(const RadialProjection& proj, int samples = 1000);

struct RemainderPoint {
  double epsilon = 0;
  double delta = 0;
  double sup_remainder = 0;
  double sup_ratio = 0;  // max over radii of |R(s)| / bound(s)
};

struct RemainderReport {
  std::vector<RemainderPoint> points;
  double ratio_slope = 0;  // slope of log sup_ratio vs log epsilon
  bool bounded = false;    // ratio_slope >= -0.1
};

/// Projection remainder PU - U + alphaN delta^{(N-2)/2} H(x, xi) + alphaN delta^{-(N-2)/2} (r eps/|x-a|)^{N-2}
/// on the annulus rho0 = r eps < |x| < R, delta = d sqrt(eps), compared with
/// delta^{(N-2)/2} [eps^{N-2}(1 + eps delta^{1-N})/|x-a|^{N-2} + delta^2 + (eps/delta)^{N-2}].
RemainderPoint remainder_check(const Dims& dims, double R, double r, double epsilon, double d, int samples = 2000);

RemainderReport remainder_sweep(const Dims& dims, double R, double r, double d, const VectorXd& epsilon_grid);

struct ScalingFit {
  std::string law;
  VectorXd delta_grid;
  VectorXd values;
  double exponent_measured = 0;
  double exponent_predicted = 0;
  double r2 = 0;
  bool log_case = false;
  double log_coeff = 0;

  bool slope_ok(double tol = 0.05) const { return std::abs(exponent_measured - exponent_predicted) <= tol; }
  /// r2 is only meaningful when the integrals actually vary; a zero exponent skips that gate.
  bool r2_ok(double min_r2 = 0.999) const { return exponent_predicted == 0.0 || r2 >= min_r2; }
  bool pass(double tol = 0.05, double min_r2 = 0.999) const { return slope_ok(tol) && r2_ok(min_r2); }
};

/// 12 geometric points from 1e-1 down to 1e-4.
VectorXd default_delta_grid();

/// omega_{N-1} int_{inner}^{outer} s^{N-1+power} U_delta(s)^q ds.
double radial_bubble_integral(const Dims& dims, double q, double delta, double inner, double outer,
                              double power = 0);

/// Average of |e_h . omega|^nu over the unit sphere S^{N-1}.
double angular_moment(int N, double nu);

struct PredictedExponent {
  double exponent;
  bool log_case;
};

PredictedExponent predicted_exponent_single(int N, double q);
PredictedExponent predicted_exponent_weighted(int N, double q, double nu1, double nu2);

/// int_{B_R} U_delta^q over the delta grid, fitted against the single-bubble exponent.
ScalingFit scaling_law_single(double q, const Dims& dims, const VectorXd& delta_grid, double R = 1,
                              unsigned threads = 1);

/// int_{B_R minus B_{r delta^2}} U^q |x_h - xi_h|^{nu1} / |x - a|^{nu2} with xi = a (tau = 0).
ScalingFit scaling_law_weighted(double q, double nu1, double nu2, const Dims& dims, const VectorXd& delta_grid,
                                double R = 1, double r = 1, unsigned threads = 1);

struct PairWeights {
  double nu1 = 0;  // |x - xi_1|^{nu1}
  double nu2 = 0;  // |x - a|^{-nu2}, a = xi_1
};

/// int_{B_1} U_{delta1,xi1}^{q1} U_{delta2,xi2}^{q2} [weights], xi_{1,2} = (-/+ separation/2) e_1,
/// by nested adaptive quadrature in axial coordinates.
double bubble_pair_integral(const Dims& dims, double q1, double delta1, double q2, double delta2, double separation,
                            const PairWeights& w = {});

struct PairScalingReport {
  VectorXd delta_grid;
  VectorXd values;
  VectorXd bounds;
  VectorXd ratios;
  double ratio_slope = 0;
  bool bounded = false;
  // Only for q1 = q2 = N/(N-2): values^{2/N} / (delta^2 (2|log delta|)^{2/N}).
  VectorXd log_bound_ratios;
};

/// Pair integrals against the three-term bound
/// delta^{(N-2)(q1+q2)/2} + delta^{(N-2)q1/2} int U^{q2} + delta^{(N-2)q2/2} int U^{q1} [weights],
/// with the single integrals taken over the ball of radius 1 + separation/2 around each center.
PairScalingReport scaling_law_pair(double q1, double q2, const Dims& dims, const VectorXd& delta_grid,
                                   double separation, const PairWeights& w = {}, unsigned threads = 1);

}  // namespace coron
