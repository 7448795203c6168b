#pragma once

#include <functional>
#include <vector>

namespace coron::quad {

struct Options {
  double abs_tol = 1e-13;
  double rel_tol = 1e-12;
  int max_intervals = 4000;
};

struct Result {
  double value = 0;
  double error = 0;
  int intervals = 0;
  bool converged = false;
};

using Integrand = std::function<double(double)>;

/// Globally adaptive 15-point Gauss-Kronrod on [a, b]. Interval bisection is driven by
/// the largest local error estimate until the total estimate meets the tolerance.
Result integrate(const Integrand& f, double a, double b, const Options& opt = {});

/// Same as integrate() with the interval pre-split at the given interior breakpoints.
Result integrate(const Integrand& f, double a, double b, const std::vector<double>& breakpoints,
                 const Options& opt = {});

/// Integral over [a, +inf) through the substitution r = tan(theta).
Result integrate_to_infinity(const Integrand& f, double a, const Options& opt = {});

/// Integral over [a, b] with 0 < a < b through s = exp(t); suited to integrands spanning
/// several decades of the radius.
Result integrate_log(const Integrand& f, double a, double b, const Options& opt = {});

}  // namespace coron::quad
