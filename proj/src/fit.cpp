#include "coron/fit.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace coron {
namespace {

double r_squared(const VectorXd& y, const VectorXd& fitted) {
  const double mean = y.mean();
  const double ss_tot = (y.array() - mean).square().sum();
  const double ss_res = (y - fitted).squaredNorm();
  return ss_tot > 0 ? 1 - ss_res / ss_tot : (ss_res == 0 ? 1.0 : 0.0);
}

struct ProjectedResidual {
  double A;
  double B;
  double sse;
};

ProjectedResidual project(const VectorXd& x, const VectorXd& y, double s) {
  const Eigen::Index n = x.size();
  MatrixXd M(n, 2);
  VectorXd rhs(n);
  // relative residual: (x^s (A L + B) - y) / y
  for (Eigen::Index i = 0; i < n; ++i) {
    const double scale = std::pow(x(i), s) / y(i);
    M(i, 0) = scale * std::abs(std::log(x(i)));
    M(i, 1) = scale;
    rhs(i) = 1.0;
  }
  const Eigen::Vector2d ab = M.colPivHouseholderQr().solve(rhs);
  double sse = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double model = std::pow(x(i), s) * (ab(0) * std::abs(std::log(x(i))) + ab(1));
    const double r = model > 0 ? std::log(model) - std::log(y(i)) : 1e3;
    sse += r * r;
  }
  return {ab(0), ab(1), sse};
}

}  // namespace

LinearFit fit_line(const VectorXd& x, const VectorXd& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit needs two or more paired samples");
  MatrixXd A(x.size(), 2);
  A.col(0) = x;
  A.col(1).setOnes();
  const Eigen::Vector2d coef = A.colPivHouseholderQr().solve(y);
  LinearFit fit;
  fit.slope = coef(0);
  fit.intercept = coef(1);
  fit.r2 = r_squared(y, A * coef);
  return fit;
}

LinearFit fit_loglog(const VectorXd& x, const VectorXd& y) {
  if (!(x.array() > 0).all() || !(y.array() > 0).all()) {
    throw std::invalid_argument("log-log fit needs positive data");
  }
  return fit_line(x.array().log().matrix(), y.array().log().matrix());
}

PowerLogFit fit_power_log(const VectorXd& x, const VectorXd& y, double s_lo, double s_hi) {
  if (x.size() != y.size() || x.size() < 3) throw std::invalid_argument("fit needs three or more paired samples");
  if (!(x.array() > 0).all() || !(y.array() > 0).all()) throw std::invalid_argument("power-log fit needs positive data");
  // The objective is not unimodal over wide brackets; a coarse scan picks the basin first.
  constexpr int kScan = 400;
  const double h = (s_hi - s_lo) / kScan;
  int best_i = 0;
  double best_f = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kScan; ++i) {
    const double f = project(x, y, s_lo + i * h).sse;
    if (f < best_f) {
      best_f = f;
      best_i = i;
    }
  }
  const double phi = (std::sqrt(5.0) - 1) / 2;
  double a = std::max(s_lo, s_lo + (best_i - 1) * h);
  double b = std::min(s_hi, s_lo + (best_i + 1) * h);
  double c = b - phi * (b - a);
  double d = a + phi * (b - a);
  double fc = project(x, y, c).sse;
  double fd = project(x, y, d).sse;
  while (b - a > 1e-10) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = project(x, y, c).sse;
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = project(x, y, d).sse;
    }
  }
  const double s = (a + b) / 2;
  const auto best = project(x, y, s);
  PowerLogFit fit;
  fit.exponent = s;
  fit.log_coeff = best.A;
  fit.constant = best.B;
  const VectorXd ly = y.array().log().matrix();
  VectorXd fitted(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    fitted(i) = std::log(std::pow(x(i), s) * (best.A * std::abs(std::log(x(i))) + best.B));
  }
  fit.r2 = r_squared(ly, fitted);
  return fit;
}

VectorXd geometric_grid(double first, double last, int n) {
  if (n < 2 || !(first > 0) || !(last > 0)) throw std::invalid_argument("geometric grid needs n >= 2 and positive ends");
  VectorXd g(n);
  const double ratio = std::pow(last / first, 1.0 / (n - 1));
  g(0) = first;
  for (int i = 1; i < n; ++i) g(i) = g(i - 1) * ratio;
  g(n - 1) = last;
  return g;
}

}  // namespace coron
