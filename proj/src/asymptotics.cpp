#include "coron/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "coron/bubble.hpp"
#include "coron/errors.hpp"
#include "coron/fit.hpp"
#include "coron/green.hpp"
#include "coron/parallel.hpp"
#include "coron/quadrature.hpp"

namespace coron {
namespace {

constexpr double kCaseTol = 1e-12;

bool same(double a, double b) { return std::abs(a - b) <= kCaseTol * std::max(1.0, std::abs(b)); }

double area_sphere(int n) { return 2 * std::pow(std::numbers::pi, (n + 1) / 2.0) / std::tgamma((n + 1) / 2.0); }

ScalingFit finish_fit(std::string law, const VectorXd& grid, VectorXd values, PredictedExponent pred) {
  ScalingFit fit;
  fit.law = std::move(law);
  fit.delta_grid = grid;
  fit.values = std::move(values);
  fit.exponent_predicted = pred.exponent;
  fit.log_case = pred.log_case;
  if (pred.log_case) {
    const auto f = fit_power_log(grid, fit.values, pred.exponent - 1, pred.exponent + 1);
    fit.exponent_measured = f.exponent;
    fit.log_coeff = f.log_coeff;
    fit.r2 = f.r2;
  } else {
    const auto f = fit_loglog(grid, fit.values);
    fit.exponent_measured = f.slope;
    fit.r2 = f.r2;
  }
  return fit;
}

}  // namespace

double RadialProjection::U(double s) const { return bubble_profile(dims, delta, s); }

double RadialProjection::PU(double s) const {
  const int N = dims.N;
  const double w = (std::pow(s, 2 - N) - std::pow(R, 2 - N)) / (std::pow(rho0, 2 - N) - std::pow(R, 2 - N));
  const double UR = U(R);
  return (U(s) - UR) - (U(rho0) - UR) * w;
}

double RadialProjection::pde_residual(double s) const {
  const int N = dims.N;
  const auto d = bubble_profile_derivatives(dims, delta, s);
  const double h1 = B * (2 - N) * std::pow(s, 1 - N);
  const double h2 = B * (2 - N) * (1 - N) * std::pow(s, -N);
  const double lap = (d.second + h2) + (N - 1) * (d.first + h1) / s;
  return -lap - std::pow(d.value, dims.p);
}

RadialProjection project_bubble_radial(const Dims& dims, double rho0, double R, double delta) {
  if (!(rho0 > 0) || !(rho0 < R)) throw DomainError("degenerate annulus: need 0 < rho0 < R");
  if (!(delta > 0)) throw std::invalid_argument("delta must be positive");
  RadialProjection p;
  p.dims = dims;
  p.delta = delta;
  p.rho0 = rho0;
  p.R = R;
  const int N = dims.N;
  const double g0 = std::pow(rho0, 2 - N);
  const double gR = std::pow(R, 2 - N);
  p.B = (p.U(R) - p.U(rho0)) / (g0 - gR);
  p.A = -p.U(R) - p.B * gR;
  return p;
}

ProjectionBoundsReport projection_bounds(const RadialProjection& proj, int samples) {
  ProjectionBoundsReport rep;
  rep.samples = samples;
  rep.min_pu = std::numeric_limits<double>::infinity();
  rep.max_excess = -std::numeric_limits<double>::infinity();
  const VectorXd s = geometric_grid(proj.rho0, proj.R, samples);
  for (int i = 0; i < samples; ++i) {
    const double pu = proj.PU(s(i));
    const double u = proj.U(s(i));
    rep.min_pu = std::min(rep.min_pu, pu);
    rep.max_excess = std::max(rep.max_excess, pu - u);
    if (i > 0 && i < samples - 1) {
      rep.max_pde_residual =
          std::max(rep.max_pde_residual, std::abs(proj.pde_residual(s(i))) / std::pow(u, proj.dims.p));
    }
  }
  rep.boundary_inner = proj.PU(proj.rho0);
  rep.boundary_outer = proj.PU(proj.R);
  return rep;
}

RemainderPoint remainder_check(const Dims& dims, double R, double r, double epsilon, double d, int samples) {
  const int N = dims.N;
  const double delta = d * std::sqrt(epsilon);
  const double k = dims.half_gap();
  const auto proj = project_bubble_radial(dims, r * epsilon, R, delta);
  const Ball<double> ball(VectorXd::Zero(N), R);
  const VectorXd xi = VectorXd::Zero(N);
  const VectorXd s = geometric_grid(r * epsilon, R, samples);
  RemainderPoint pt;
  pt.epsilon = epsilon;
  pt.delta = delta;
  VectorXd x = VectorXd::Zero(N);
  for (int i = 0; i < samples; ++i) {
    x(0) = std::min(s(i), R);
    const double H = kernel_regular_part(ball, x, xi);
    const double rem = proj.PU(s(i)) - proj.U(s(i)) + dims.alphaN * std::pow(delta, k) * H +
                       dims.alphaN * std::pow(delta, -k) * std::pow(r * epsilon / s(i), N - 2);
    const double bound = std::pow(delta, k) * (std::pow(epsilon, N - 2) * (1 + epsilon * std::pow(delta, 1 - N)) /
                                                    std::pow(s(i), N - 2) +
                                                delta * delta + std::pow(epsilon / delta, N - 2));
    pt.sup_remainder = std::max(pt.sup_remainder, std::abs(rem));
    pt.sup_ratio = std::max(pt.sup_ratio, std::abs(rem) / bound);
  }
  return pt;
}

RemainderReport remainder_sweep(const Dims& dims, double R, double r, double d, const VectorXd& epsilon_grid) {
  RemainderReport rep;
  VectorXd ratios(epsilon_grid.size());
  for (Eigen::Index i = 0; i < epsilon_grid.size(); ++i) {
    rep.points.push_back(remainder_check(dims, R, r, epsilon_grid(i), d));
    ratios(i) = rep.points.back().sup_ratio;
  }
  rep.ratio_slope = fit_loglog(epsilon_grid, ratios).slope;
  rep.bounded = rep.ratio_slope >= -0.1;
  return rep;
}

VectorXd default_delta_grid() { return geometric_grid(1e-1, 1e-4, 12); }

double radial_bubble_integral(const Dims& dims, double q, double delta, double inner, double outer, double power) {
  const int N = dims.N;
  if (!(inner >= 0 && outer > inner)) throw std::invalid_argument("radial integral needs 0 <= inner < outer");
  const double k = dims.half_gap();
  const double prefactor = dims.omegaNm1 * std::pow(dims.alphaN, q) * std::pow(delta, N + power - k * q);
  const auto f = [=](double y) { return std::pow(y, N - 1 + power) * std::pow(1 + y * y, -k * q); };
  const quad::Options opt{0.0, 1e-12, 8000};
  const double lo = inner / delta;
  const double hi = outer / delta;
  double total = 0;
  if (lo > 0) {
    total = quad::integrate_log(f, lo, hi, opt).value;
  } else {
    const double mid = std::min(1.0, hi);
    total = quad::integrate(f, 0.0, mid, opt).value;
    if (hi > mid) total += quad::integrate_log(f, mid, hi, opt).value;
  }
  return prefactor * total;
}

double angular_moment(int N, double nu) {
  return std::tgamma(N / 2.0) * std::tgamma((nu + 1) / 2) / (std::sqrt(std::numbers::pi) * std::tgamma((N + nu) / 2));
}

PredictedExponent predicted_exponent_single(int N, double q) {
  if (!(q > 0)) throw std::invalid_argument("exponent q must be positive");
  const double lower = double(N) / (N - 2);
  const double upper = 2.0 * N / (N - 2);
  if (same(q, lower)) return {N / 2.0, true};
  if (same(q, upper)) return {0.0, false};
  if (q < lower) return {(N - 2) * q / 2, false};
  return {N - (N - 2) * q / 2, false};
}

PredictedExponent predicted_exponent_weighted(int N, double q, double nu1, double nu2) {
  if (!(q > 0)) throw HypothesisError("exponent q must be positive");
  if (!(nu1 >= 0)) throw HypothesisError("nu1 must be nonnegative");
  if (!(nu2 >= 0 && nu2 <= N)) throw HypothesisError("nu2 must lie in [0, N]");
  const double exponent = N + nu1 - nu2 - (N - 2) * q / 2;
  if (same(nu2, N)) {
    if (nu1 != 0) throw HypothesisError("nu2 = N requires nu1 = 0");
    if (!((N - 2) * q + nu2 > N)) throw HypothesisError("need (N-2) q + nu2 > N");
    return {exponent, true};
  }
  if (nu2 == 0 && same(q, (N + nu1) / (N - 2))) return {exponent, true};
  if (!((N - 2) * q + nu2 - nu1 > N)) throw HypothesisError("need (N-2) q + nu2 - nu1 > N");
  return {exponent, false};
}

ScalingFit scaling_law_single(double q, const Dims& dims, const VectorXd& delta_grid, double R, unsigned threads) {
  const auto pred = predicted_exponent_single(dims.N, q);
  const auto vals = parallel_map(
      static_cast<std::size_t>(delta_grid.size()),
      [&](std::size_t i) { return radial_bubble_integral(dims, q, delta_grid(i), 0.0, R); }, threads);
  return finish_fit("single q=" + std::to_string(q), delta_grid, Eigen::Map<const VectorXd>(vals.data(), vals.size()),
                    pred);
}

ScalingFit scaling_law_weighted(double q, double nu1, double nu2, const Dims& dims, const VectorXd& delta_grid,
                                double R, double r, unsigned threads) {
  const auto pred = predicted_exponent_weighted(dims.N, q, nu1, nu2);
  const double m = angular_moment(dims.N, nu1);
  const auto vals = parallel_map(
      static_cast<std::size_t>(delta_grid.size()),
      [&](std::size_t i) {
        const double d = delta_grid(i);
        return m * radial_bubble_integral(dims, q, d, r * d * d, R, nu1 - nu2);
      },
      threads);
  return finish_fit("weighted q=" + std::to_string(q) + " nu1=" + std::to_string(nu1) + " nu2=" + std::to_string(nu2),
                    delta_grid, Eigen::Map<const VectorXd>(vals.data(), vals.size()), pred);
}

double bubble_pair_integral(const Dims& dims, double q1, double delta1, double q2, double delta2, double separation,
                            const PairWeights& w) {
  const int N = dims.N;
  if (!(separation > 0 && separation < 1)) throw HypothesisError("separation must lie in (0, 1)");
  const double z1 = -separation / 2;
  const double z2 = separation / 2;
  const double shell = area_sphere(N - 2);
  const double dmin = std::min(delta1, delta2);
  const quad::Options inner_opt{0.0, 1e-11, 4000};
  const quad::Options outer_opt{0.0, 1e-9, 4000};
  const auto integrand = [&](double z, double rho) {
    const double a2 = (z - z1) * (z - z1) + rho * rho;
    const double b2 = (z - z2) * (z - z2) + rho * rho;
    double v = std::pow(rho, N - 2);
    if (q1 != 0) v *= std::pow(dims.alphaN * std::pow(delta1 / (delta1 * delta1 + a2), dims.half_gap()), q1);
    if (q2 != 0) v *= std::pow(dims.alphaN * std::pow(delta2 / (delta2 * delta2 + b2), dims.half_gap()), q2);
    if (w.nu1 != w.nu2) v *= std::pow(a2, (w.nu1 - w.nu2) / 2);
    return v;
  };
  const auto inner = [&](double z) {
    const double top = std::sqrt(std::max(0.0, 1 - z * z));
    if (top == 0) return 0.0;
    std::vector<double> bps;
    const double gap = std::min(std::abs(z - z1), std::abs(z - z2));
    for (double c = std::max(dmin, gap); c < top; c *= 10) bps.push_back(c);
    return quad::integrate([&](double rho) { return integrand(z, rho); }, 0.0, top, bps, inner_opt).value;
  };
  std::vector<double> bps{z1, z2};
  for (double c = dmin; c < separation / 2; c *= 10) {
    for (double zc : {z1, z2}) {
      bps.push_back(zc - c);
      bps.push_back(zc + c);
    }
  }
  std::sort(bps.begin(), bps.end());
  return shell * quad::integrate(inner, -1.0, 1.0, bps, outer_opt).value;
}

PairScalingReport scaling_law_pair(double q1, double q2, const Dims& dims, const VectorXd& delta_grid,
                                   double separation, const PairWeights& w, unsigned threads) {
  const int N = dims.N;
  if (!(q1 > 0) || !(q2 >= 0)) throw HypothesisError("need q1 > 0 and q2 >= 0");
  if (!(w.nu1 >= 0 && w.nu2 >= 0 && w.nu2 < N)) throw HypothesisError("weights need nu1 >= 0 and 0 <= nu2 < N");
  if (!(separation > 0 && separation < 1)) throw HypothesisError("separation must lie in (0, 1)");
  if (separation <= 2 * delta_grid.maxCoeff()) throw HypothesisError("centers too close for the delta grid");
  const double k = dims.half_gap();
  const double reach = 1 + separation / 2;
  const Eigen::Index n = delta_grid.size();
  PairScalingReport rep;
  rep.delta_grid = delta_grid;
  rep.values.resize(n);
  rep.bounds.resize(n);
  const auto rows = parallel_map(
      static_cast<std::size_t>(n),
      [&](std::size_t i) {
        const double d = delta_grid(i);
        const double value = bubble_pair_integral(dims, q1, d, q2, d, separation, w);
        const double I1 = radial_bubble_integral(dims, q1, d, 0.0, reach, w.nu1 - w.nu2);
        const double I2 = q2 > 0 ? radial_bubble_integral(dims, q2, d, 0.0, reach) : dims.omegaN * std::pow(reach, N);
        const double bound = std::pow(d, k * (q1 + q2)) + std::pow(d, k * q1) * I2 + std::pow(d, k * q2) * I1;
        return std::make_pair(value, bound);
      },
      threads);
  for (Eigen::Index i = 0; i < n; ++i) {
    rep.values(i) = rows[i].first;
    rep.bounds(i) = rows[i].second;
  }
  rep.ratios = (rep.values.array() / rep.bounds.array()).matrix();
  rep.ratio_slope = fit_loglog(delta_grid, rep.ratios).slope;
  rep.bounded = rep.ratios.allFinite() && rep.ratio_slope >= -0.1;
  const double crit = double(N) / (N - 2);
  if (same(q1, crit) && same(q2, crit) && w.nu1 == 0 && w.nu2 == 0) {
    rep.log_bound_ratios.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double d = delta_grid(i);
      rep.log_bound_ratios(i) =
          std::pow(rep.values(i), 2.0 / N) / (d * d * std::pow(2 * std::abs(std::log(d)), 2.0 / N));
    }
  }
  return rep;
}

}  // namespace coron
