#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "coron/dimension.hpp"
#include "coron/types.hpp"

namespace coron {

/// b1 = (alphaN^{p+1}/N) int (1+|y|^2)^{-N} dy.
double constant_b1(const Dims& dims);
/// b2 = (alphaN^{p+1}/2) int (1+|y|^2)^{-(N+2)/2} dy.
double constant_b2(const Dims& dims);

/// Gamma as a function of t = |tau|, with first and second radial derivatives.
/// `first_over_t` is Gamma'(t)/t, finite at t = 0.
struct GammaRadial {
  double value = 0;
  double first = 0;
  double first_over_t = 0;
  double second = 0;
};

GammaRadial gamma_radial(const Dims& dims, double t);

/// Gamma(tau) = int |y + tau|^{2-N} (1+|y|^2)^{-(N+2)/2} dy, through the spherical mean-value
/// reduction to two radial integrals.
double gamma_kernel(const Dims& dims, const VectorXd& tau);

struct MonteCarloEstimate {
  double value = 0;
  double std_error = 0;
};

/// Direct N-dimensional Monte Carlo estimate of Gamma(tau). Samples z = y + tau with density
/// proportional to |z|^{2-N} (1+|z|^2)^{-2}, which keeps the importance weights bounded.
MonteCarloEstimate gamma_monte_carlo(const Dims& dims, const VectorXd& tau, std::int64_t samples, std::uint64_t seed);

struct ReducedEnergyModel {
  Dims dims;
  VectorXd weights;
  VectorXd robin;   // H(a_i, a_i), Newtonian-kernel normalization
  VectorXd hole_r;  // r_i
  double b1 = 0;
  double b2 = 0;

  static ReducedEnergyModel make(const Dims& dims, VectorXd weights, VectorXd robin, VectorXd hole_r);

  int peaks() const { return static_cast<int>(weights.size()); }
  // alphaN^{p+1} r_i^{N-2} / 2
  double kappa(int i) const;
  std::vector<std::string> violations() const;
};

/// Weight mu^{-2/(p-1)} of a single uncoupled peak.
double single_peak_weight(const Dims& dims, double mu);

/// Point (d, tau) of the reduced space. tau holds one column per peak.
struct ReducedPoint {
  VectorXd d;
  MatrixXd tau;
  double eta = 1e-3;

  static ReducedPoint at_origin(VectorXd d, int N, double eta = 1e-3);
  bool in_box() const;
};

double psi_eval(const ReducedEnergyModel& model, const ReducedPoint& pt);

/// Gradient ordered as (d_1..d_k, tau_1, .., tau_k), each tau_i contributing N entries.
VectorXd psi_grad(const ReducedEnergyModel& model, const ReducedPoint& pt);

MatrixXd psi_hessian(const ReducedEnergyModel& model, const ReducedPoint& pt);

struct CriticalPointReport {
  ReducedPoint point;
  VectorXd grad;
  MatrixXd hessian;
  double grad_norm = 0;
  double mixed_block_max = 0;   // max |d^2 Psi / d tau d d|
  double d_offdiag_max = 0;     // max off-diagonal entry of the d-block
  bool d_block_positive = false;
  bool tau_block_negative = false;
  bool in_box = false;
  bool nondegenerate_saddle = false;
};

/// (d~, 0) with d~_i = (B~_i/A~_i)^{1/(2(N-2))}, the Hessian there and its block signature.
CriticalPointReport critical_point(const ReducedEnergyModel& model, double eta = 1e-3);

/// Newton on grad Psi restricted to tau = 0, from `start`.
VectorXd critical_point_newton(const ReducedEnergyModel& model, VectorXd start, int max_iter = 100);

/// Leading-order reduced energy (sum weights) b1 + Psi(d~, 0) eps^{(N-2)/2}.
double energy_expansion(const ReducedEnergyModel& model, double epsilon);

/// sigma_lk, the limit of delta^2 |P psi^l|^2 pairings, by radial quadrature.
/// Off-diagonal entries vanish by odd symmetry.
double sigma_constant(const Dims& dims, int l, int k);

/// sigma_lk for l, k in {0, 1} through a two-dimensional axial quadrature (y_1, |y'|).
double sigma_axial(const Dims& dims, int l, int k);

}  // namespace coron
