#pragma once

#include <string>
#include <vector>

#include "coron/coupling.hpp"
#include "coron/dimension.hpp"
#include "coron/types.hpp"

namespace coron {

/// Samples of a radial function on rho0 = nodes(0) < ... < nodes(n-1) = R.
struct RadialGrid {
  Dims dims;
  VectorXd nodes;
  VectorXd values;

  Eigen::Index size() const { return nodes.size(); }
};

/// Geometric mesh from rho0 to R: uniform in log s, so every scale between the hole and the
/// outer radius (including the concentration scale) gets the same resolution.
RadialGrid make_log_grid(const Dims& dims, double rho0, double R, int nodes);

struct ConcentrationMetrics {
  double umax = 0;
  double rpeak = 0;
  double delta_est = 0;  // (alphaN mu^{-1/(p-1)} / umax)^{2/(N-2)}
  double d_est = 0;      // delta_est / sqrt(eps)
  double energy = 0;     // J on the discrete solution
};

enum class SolveStatus { converged, trivial_branch, diverged };

std::string to_string(SolveStatus s);

struct RadialSolverOptions {
  int nodes = 2000;
  int max_iter = 50;
  double tol = 1e-10;  // sup-norm residual relative to sup |V mu f(u)|
  double mu = 1;
};

struct RadialSolveResult {
  SolveStatus status = SolveStatus::diverged;
  RadialGrid grid;
  ConcentrationMetrics metrics;
  std::vector<double> residual_history;
  int iterations = 0;
  double epsilon = 0;
};

/// Discrete residual of -u'' - (N-1)/s u' - mu (u^+)^p at interior nodes, in conservative
/// form -(F_{i+1/2} - F_{i-1/2}) - V_i mu f(u_i) with F = s^{N-1} u' and V_i the shell volume.
/// Entries 0 and n-1 hold the Dirichlet defects u(rho0), u(R).
VectorXd discrete_residual(const RadialGrid& g, double mu = 1);

/// sup |V_i mu f(u_i)| over interior nodes, the scale of the residual norm.
double residual_scale(const RadialGrid& g, double mu = 1);

/// mu^{-1/(p-1)} PU_{delta,0} on a log mesh of the annulus r eps < s < R.
RadialGrid bubble_ansatz(const Dims& dims, double R, double r, double epsilon, double delta, double mu, int nodes);

/// delta~ = d~ sqrt(eps) for the single centered peak in B_R with hole coefficient r.
double ansatz_scale(const Dims& dims, double R, double r, double epsilon, double mu);

RadialSolveResult solve_radial(const Dims& dims, double R, double r, double epsilon, const RadialGrid& initial,
                               const RadialSolverOptions& opt = {});

/// solve_radial started from the bubble ansatz with the reduced-energy scale.
RadialSolveResult solve_radial_ansatz(const Dims& dims, double R, double r, double epsilon,
                                      const RadialSolverOptions& opt = {});

/// J = omega_{N-1} int s^{N-1} [ |u'|^2 / 2 - mu (u^+)^{p+1} / (p+1) ] ds on the discrete profile.
double radial_energy(const RadialGrid& g, double mu = 1);

struct RateSweepReport {
  VectorXd epsilon_grid;
  std::vector<RadialSolveResult> solves;
  VectorXd delta_est;
  VectorXd d_est;
  double slope = 0;
  double r2 = 0;
  double d_limit = 0;       // d_est at the smallest epsilon
  double d_tilde = 0;       // reduced-energy prediction
  double d_spread = 0;      // relative spread of d_est over the last three points
  bool complete = false;    // every solve converged
};

/// Continuation from the largest to the smallest epsilon; each solve starts from the previous
/// profile rescaled by the bubble covariance law, falling back to the ansatz if that fails.
RateSweepReport rate_sweep(const Dims& dims, double R, double r, const VectorXd& epsilon_grid,
                           const RadialSolverOptions& opt = {});

struct GroupComposition {
  std::vector<RadialGrid> components;  // u_i = c_i w
  VectorXd residual_sup;               // sup-norm residual of each system equation
  VectorXd identity_gap;               // sup |res_i - c_i res_w|, relative to sup |V w^p|
  double scalar_residual = 0;          // sup |res_w|
};

/// Substitutes u_i = c_i w into the group's system -Delta u_i = mu_i u_i^p + sum_{j != i} beta_ij
/// u_j^{(p+1)/2} u_i^{(p-1)/2} and evaluates each discrete residual directly.
GroupComposition compose_group_solution(const CouplingSpec& spec, const CVector& c, const RadialGrid& w);

/// Discrete coupled energy of component profiles sharing one mesh.
double energy_of_solution(const std::vector<RadialGrid>& grids, const CouplingSpec& spec);

}  // namespace coron
