#pragma once

#include "coron/types.hpp"

namespace coron {

struct LinearFit {
  double slope = 0;
  double intercept = 0;
  double r2 = 0;
};

/// Least-squares line y = slope x + intercept.
LinearFit fit_line(const VectorXd& x, const VectorXd& y);

/// Line through (log x, log y). All entries must be positive.
LinearFit fit_loglog(const VectorXd& x, const VectorXd& y);

/// y ~ x^s (A |log x| + B), fitted by variable projection: for each s the pair (A, B) solves a
/// relative least-squares problem, and s minimizes the remaining log-residual.
struct PowerLogFit {
  double exponent = 0;
  double log_coeff = 0;
  double constant = 0;
  double r2 = 0;
};

PowerLogFit fit_power_log(const VectorXd& x, const VectorXd& y, double s_lo, double s_hi);

/// n points from `first` to `last` in geometric progression.
VectorXd geometric_grid(double first, double last, int n);

}  // namespace coron
