#include "coron/reduced_energy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "coron/errors.hpp"
#include "coron/quadrature.hpp"

namespace coron {
namespace {

constexpr double kSmallT = 1e-3;

double radial_integral(const Dims& dims, const quad::Integrand& f) {
  const auto r = quad::integrate_to_infinity(f, 0.0, {1e-14, 1e-13, 8000});
  return dims.omegaNm1 * r.value;
}

double source_profile(const Dims& dims, double r) { return std::pow(1 + r * r, -(dims.N + 2) / 2.0); }

double area_sphere(int n) {
  // |S^{n}| = 2 pi^{(n+1)/2} / Gamma((n+1)/2)
  return 2 * std::pow(std::numbers::pi, (n + 1) / 2.0) / std::tgamma((n + 1) / 2.0);
}

void require_point(const ReducedEnergyModel& model, const ReducedPoint& pt) {
  if (pt.d.size() != model.peaks() || pt.tau.cols() != model.peaks() || pt.tau.rows() != model.dims.N) {
    throw std::invalid_argument("reduced point does not match the model size");
  }
  if (!pt.in_box()) throw DomainError("reduced point lies outside X_eta");
}

// phi(tau) = Gamma(|tau|) (1+|tau|^2)^{-(N-2)/2}: value, gradient and Hessian.
struct RadialField {
  double value;
  VectorXd grad;
  MatrixXd hess;
};

RadialField tau_factor(const Dims& dims, const VectorXd& tau) {
  const int N = dims.N;
  const double t = tau.norm();
  const auto G = gamma_radial(dims, t);
  const double s = 1 + t * t;
  const double rho = std::pow(s, -(N - 2) / 2.0);
  const double rho1_over_t = -(N - 2) * std::pow(s, -N / 2.0);
  const double rho2 = -(N - 2) * (std::pow(s, -N / 2.0) - N * t * t * std::pow(s, -N / 2.0 - 1));
  const double g1_over_t = G.first_over_t * rho + G.value * rho1_over_t;
  const double g2 = G.second * rho + 2 * G.first * rho1_over_t * t + G.value * rho2;

  RadialField out{G.value * rho, g1_over_t * tau, MatrixXd::Identity(N, N) * g1_over_t};
  if (t > 0) {
    const VectorXd e = tau / t;
    out.hess += (g2 - g1_over_t) * e * e.transpose();
  }
  return out;
}

}  // namespace

double constant_b1(const Dims& dims) {
  const int N = dims.N;
  const double I = radial_integral(dims, [N](double r) { return std::pow(r, N - 1) * std::pow(1 + r * r, -N); });
  return std::pow(dims.alphaN, dims.p + 1) / N * I;
}

double constant_b2(const Dims& dims) {
  const int N = dims.N;
  const double I =
      radial_integral(dims, [N](double r) { return std::pow(r, N - 1) * std::pow(1 + r * r, -(N + 2) / 2.0); });
  return std::pow(dims.alphaN, dims.p + 1) / 2 * I;
}

GammaRadial gamma_radial(const Dims& dims, double t) {
  if (!(t >= 0)) throw std::invalid_argument("gamma_radial needs t >= 0");
  const int N = dims.N;
  const double w = dims.omegaNm1;
  const auto f = [&dims](double r) { return source_profile(dims, r); };
  const quad::Options opt{1e-15, 1e-13, 8000};
  const double tail = quad::integrate_to_infinity([&f](double r) { return r * f(r); }, t, opt).value;
  GammaRadial out;
  if (t < kSmallT) {
    // inner integral int_0^t r^{N-1} f = t^N/N - t^{N+2}/2 + O(t^{N+4})
    const double inner_scaled = 1.0 / N - t * t / 2;  // inner / t^N
    out.value = w * (t * t * inner_scaled + tail);
    out.first_over_t = w * (2 - N) * inner_scaled;
    out.first = out.first_over_t * t;
    out.second = w * (2 - N) * ((1 - N) * inner_scaled + f(t));
    return out;
  }
  const double inner =
      quad::integrate([&f, N](double r) { return std::pow(r, N - 1) * f(r); }, 0.0, t, opt).value;
  out.value = w * (std::pow(t, 2 - N) * inner + tail);
  out.first = w * (2 - N) * std::pow(t, 1 - N) * inner;
  out.first_over_t = out.first / t;
  out.second = w * (2 - N) * ((1 - N) * std::pow(t, -N) * inner + f(t));
  return out;
}

double gamma_kernel(const Dims& dims, const VectorXd& tau) {
  if (tau.size() != dims.N) throw std::invalid_argument("tau has wrong dimension");
  return gamma_radial(dims, tau.norm()).value;
}

MonteCarloEstimate gamma_monte_carlo(const Dims& dims, const VectorXd& tau, std::int64_t samples,
                                     std::uint64_t seed) {
  const int N = dims.N;
  if (tau.size() != N) throw std::invalid_argument("tau has wrong dimension");
  if (samples < 2) throw std::invalid_argument("need at least two samples");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> normal;
  // radial law of |z|: density r (1+r^2)^{-2} up to normalization; u = r^2 is uniform in u/(1+u)
  const double Z = dims.omegaNm1 / 2;
  double mean = 0;
  double m2 = 0;
  VectorXd z(N);
  for (std::int64_t n = 1; n <= samples; ++n) {
    for (int i = 0; i < N; ++i) z(i) = normal(rng);
    const double U = unif(rng);
    const double u = U / (1 - U);
    z *= std::sqrt(u) / z.norm();
    const double y2 = (z - tau).squaredNorm();
    const double weight = Z * std::pow(1 + y2, -(N + 2) / 2.0) * (1 + u) * (1 + u);
    const double delta = weight - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (weight - mean);
  }
  const double var = m2 / static_cast<double>(samples - 1);
  return {mean, std::sqrt(var / static_cast<double>(samples))};
}

ReducedEnergyModel ReducedEnergyModel::make(const Dims& dims, VectorXd weights, VectorXd robin, VectorXd hole_r) {
  ReducedEnergyModel m;
  m.dims = dims;
  m.weights = std::move(weights);
  m.robin = std::move(robin);
  m.hole_r = std::move(hole_r);
  m.b1 = constant_b1(dims);
  m.b2 = constant_b2(dims);
  const auto bad = m.violations();
  if (!bad.empty()) throw std::invalid_argument("invalid reduced energy model: " + bad.front());
  return m;
}

double ReducedEnergyModel::kappa(int i) const {
  return std::pow(dims.alphaN, dims.p + 1) * std::pow(hole_r(i), dims.N - 2) / 2;
}

std::vector<std::string> ReducedEnergyModel::violations() const {
  std::vector<std::string> out;
  const auto k = weights.size();
  if (k == 0) out.push_back("at least one peak is required");
  if (robin.size() != k || hole_r.size() != k) out.push_back("weights, robin values and hole radii differ in length");
  if (!(weights.array() > 0).all()) out.push_back("weights must be positive");
  if (!(robin.array() > 0).all()) out.push_back("robin values must be positive");
  if (!(hole_r.array() > 0).all()) out.push_back("hole radii must be positive");
  return out;
}

double single_peak_weight(const Dims& dims, double mu) {
  if (!(mu > 0)) throw std::invalid_argument("mu must be positive");
  return std::pow(mu, -2 / (dims.p - 1));
}

ReducedPoint ReducedPoint::at_origin(VectorXd d, int N, double eta) {
  ReducedPoint pt;
  pt.tau = MatrixXd::Zero(N, d.size());
  pt.d = std::move(d);
  pt.eta = eta;
  return pt;
}

bool ReducedPoint::in_box() const {
  if (!(eta > 0 && eta < 1)) return false;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (!(d(i) > eta && d(i) < 1 / eta)) return false;
    if (!(tau.col(i).norm() < 1 / eta)) return false;
  }
  return true;
}

double psi_eval(const ReducedEnergyModel& model, const ReducedPoint& pt) {
  require_point(model, pt);
  const int N = model.dims.N;
  double total = 0;
  for (int i = 0; i < model.peaks(); ++i) {
    const double t = pt.tau.col(i).norm();
    const double dn = std::pow(pt.d(i), N - 2);
    const double phi = gamma_radial(model.dims, t).value * std::pow(1 + t * t, -(N - 2) / 2.0);
    total += model.weights(i) * (model.b2 * model.robin(i) * dn + model.kappa(i) * phi / dn);
  }
  return total;
}

VectorXd psi_grad(const ReducedEnergyModel& model, const ReducedPoint& pt) {
  require_point(model, pt);
  const int N = model.dims.N;
  const int k = model.peaks();
  VectorXd g = VectorXd::Zero(k * (N + 1));
  for (int i = 0; i < k; ++i) {
    const double d = pt.d(i);
    const auto phi = tau_factor(model.dims, pt.tau.col(i));
    const double w = model.weights(i);
    const double K = model.kappa(i);
    g(i) = w * (N - 2) * (model.b2 * model.robin(i) * std::pow(d, N - 3) - K * phi.value * std::pow(d, 1 - N));
    g.segment(k + i * N, N) = w * K * std::pow(d, 2 - N) * phi.grad;
  }
  return g;
}

MatrixXd psi_hessian(const ReducedEnergyModel& model, const ReducedPoint& pt) {
  require_point(model, pt);
  const int N = model.dims.N;
  const int k = model.peaks();
  MatrixXd H = MatrixXd::Zero(k * (N + 1), k * (N + 1));
  for (int i = 0; i < k; ++i) {
    const double d = pt.d(i);
    const auto phi = tau_factor(model.dims, pt.tau.col(i));
    const double w = model.weights(i);
    const double K = model.kappa(i);
    const int off = k + i * N;
    H(i, i) = w * (N - 2) *
              ((N - 3) * model.b2 * model.robin(i) * std::pow(d, N - 4) + (N - 1) * K * phi.value * std::pow(d, -N));
    const VectorXd mixed = -w * (N - 2) * K * std::pow(d, 1 - N) * phi.grad;
    H.block(off, i, N, 1) = mixed;
    H.block(i, off, 1, N) = mixed.transpose();
    H.block(off, off, N, N) = w * K * std::pow(d, 2 - N) * phi.hess;
  }
  return H;
}

CriticalPointReport critical_point(const ReducedEnergyModel& model, double eta) {
  const int N = model.dims.N;
  const int k = model.peaks();
  const double gamma0 = gamma_radial(model.dims, 0.0).value;
  VectorXd d(k);
  for (int i = 0; i < k; ++i) {
    const double A = model.weights(i) * model.b2 * model.robin(i);
    const double B = model.weights(i) * model.kappa(i) * gamma0;
    d(i) = std::pow(B / A, 1.0 / (2 * (N - 2)));
  }
  CriticalPointReport rep;
  rep.point = ReducedPoint::at_origin(d, N, eta);
  rep.in_box = rep.point.in_box();
  // Evaluate on a widened box when d~ escapes the configured one, so the report stays complete.
  ReducedPoint probe = rep.point;
  if (!rep.in_box) probe.eta = std::min({eta, d.minCoeff() / 2, 1 / (2 * d.maxCoeff())});
  rep.grad = psi_grad(model, probe);
  rep.hessian = psi_hessian(model, probe);
  rep.grad_norm = rep.grad.norm();
  rep.mixed_block_max = rep.hessian.block(k, 0, k * N, k).cwiseAbs().maxCoeff();
  const MatrixXd dd = rep.hessian.topLeftCorner(k, k);
  rep.d_offdiag_max = (dd - MatrixXd(dd.diagonal().asDiagonal())).cwiseAbs().maxCoeff();
  rep.d_block_positive = (dd.diagonal().array() > 0).all();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(rep.hessian.bottomRightCorner(k * N, k * N));
  rep.tau_block_negative = (es.eigenvalues().array() < 0).all();
  rep.nondegenerate_saddle = rep.d_block_positive && rep.tau_block_negative && rep.d_offdiag_max == 0.0;
  return rep;
}

VectorXd critical_point_newton(const ReducedEnergyModel& model, VectorXd d, int max_iter) {
  const int N = model.dims.N;
  const int k = model.peaks();
  for (int it = 0; it < max_iter; ++it) {
    ReducedPoint pt = ReducedPoint::at_origin(d, N, std::min(1e-3, d.minCoeff() / 2));
    const VectorXd g = psi_grad(model, pt).head(k);
    if (g.norm() < 1e-13 * std::max(1.0, psi_eval(model, pt))) break;
    const VectorXd step = psi_hessian(model, pt).topLeftCorner(k, k).ldlt().solve(g);
    // keep d positive
    double damp = 1.0;
    while (((d - damp * step).array() <= 0).any()) damp /= 2;
    d -= damp * step;
  }
  return d;
}

double energy_expansion(const ReducedEnergyModel& model, double epsilon) {
  if (!(epsilon > 0)) throw std::invalid_argument("epsilon must be positive");
  ReducedPoint pt = critical_point(model).point;
  pt.eta = std::min({pt.eta, pt.d.minCoeff() / 2, 1 / (2 * pt.d.maxCoeff())});
  return model.weights.sum() * model.b1 + psi_eval(model, pt) * std::pow(epsilon, (model.dims.N - 2) / 2.0);
}

double sigma_constant(const Dims& dims, int l, int k) {
  const int N = dims.N;
  if (l < 0 || l > N || k < 0 || k > N) throw std::out_of_range("sigma index must lie in 0..N");
  if (l != k) return 0.0;
  const double pre = dims.p * std::pow(dims.alphaN, dims.p + 1);
  if (l == 0) {
    const double I = radial_integral(dims, [N](double r) {
      const double r2 = r * r;
      return std::pow(r, N - 1) * (r2 - 1) * (r2 - 1) * std::pow(1 + r2, -(N + 2));
    });
    return pre * std::pow((N - 2) / 2.0, 2) * I;
  }
  // int y_l^2 g(|y|) dy = (1/N) int |y|^2 g(|y|) dy
  const double I =
      radial_integral(dims, [N](double r) { return std::pow(r, N + 1) * std::pow(1 + r * r, -(N + 2)); });
  return pre * (N - 2) * (N - 2) * I / N;
}

double sigma_axial(const Dims& dims, int l, int k) {
  const int N = dims.N;
  if (l < 0 || l > 1 || k < 0 || k > 1) throw std::out_of_range("axial sigma supports indices 0 and 1");
  const auto phi = [N](int idx, double z, double rho) {
    return idx == 0 ? (N - 2) / 2.0 * (z * z + rho * rho - 1) : (N - 2) * z;
  };
  const double pre = dims.p * std::pow(dims.alphaN, dims.p + 1);
  const double shell = area_sphere(N - 2);
  const quad::Options opt{1e-14, 1e-11, 4000};
  const auto inner = [&](double z) {
    return quad::integrate_to_infinity(
               [&](double rho) {
                 return phi(l, z, rho) * phi(k, z, rho) * std::pow(1 + z * z + rho * rho, -(N + 2)) *
                        std::pow(rho, N - 2);
               },
               0.0, opt)
        .value;
  };
  const double pos = quad::integrate_to_infinity(inner, 0.0, opt).value;
  const double neg = quad::integrate_to_infinity([&](double z) { return inner(-z); }, 0.0, opt).value;
  return pre * shell * (pos + neg);
}

}  // namespace coron
