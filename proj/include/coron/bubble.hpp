#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "coron/dimension.hpp"
#include "coron/errors.hpp"
#include "coron/types.hpp"

namespace coron {

/// Aubin-Talenti bubble U_{delta,xi}(x) = alphaN (delta / (delta^2 + |x-xi|^2))^{(N-2)/2}.
template <typename Scalar = double>
struct BubbleParams {
  Scalar delta{1};
  Vector<Scalar> xi;
  DimensionConstants<Scalar> dims;

  BubbleParams(Scalar delta_, Vector<Scalar> xi_, DimensionConstants<Scalar> dims_)
      : delta(delta_), xi(std::move(xi_)), dims(dims_) {
    if (!(delta > Scalar(0))) throw std::invalid_argument("bubble scale delta must be positive");
    if (xi.size() != dims.N) throw std::invalid_argument("bubble center has wrong dimension");
  }

  // Centered at the origin.
  BubbleParams(Scalar delta_, DimensionConstants<Scalar> dims_)
      : BubbleParams(delta_, Vector<Scalar>::Zero(dims_.N), dims_) {}
};

template <typename Scalar>
struct RadialDerivatives {
  Scalar value{};
  Scalar first{};
  Scalar second{};
};

/// Radial profile U(r) of a bubble with scale delta, together with U' and U''.
template <typename Scalar>
RadialDerivatives<Scalar> bubble_profile_derivatives(const DimensionConstants<Scalar>& dims, Scalar delta,
                                                     Scalar r) {
  using std::pow;
  const Scalar k = dims.half_gap();
  const Scalar g = delta * delta + r * r;
  const Scalar amp = dims.alphaN * pow(delta, k);
  const Scalar gk = pow(g, -k);
  RadialDerivatives<Scalar> out;
  out.value = amp * gk;
  out.first = -2 * k * amp * r * gk / g;
  out.second = -2 * k * amp * (gk / g - 2 * (k + 1) * r * r * gk / (g * g));
  return out;
}

template <typename Scalar>
Scalar bubble_profile(const DimensionConstants<Scalar>& dims, Scalar delta, Scalar r) {
  using std::pow;
  return dims.alphaN * pow(delta / (delta * delta + r * r), dims.half_gap());
}

template <typename Scalar, typename Derived>
Scalar bubble_eval(const BubbleParams<Scalar>& b, const Eigen::MatrixBase<Derived>& x) {
  return bubble_profile(b.dims, b.delta, Scalar((x - b.xi).norm()));
}

/// Kernel element psi^h of the linearized operator at U_{delta,xi}:
/// h = 0 is dU/d(delta), h = 1..N is dU/d(xi_h).
template <typename Scalar, typename Derived>
Scalar psi_eval(const BubbleParams<Scalar>& b, int h, const Eigen::MatrixBase<Derived>& x) {
  using std::pow;
  const int N = b.dims.N;
  if (h < 0 || h > N) {
    throw std::out_of_range("kernel index must lie in 0.." + std::to_string(N) + ", got " + std::to_string(h));
  }
  const Vector<Scalar> diff = x - b.xi;
  const Scalar r2 = diff.squaredNorm();
  const Scalar d2 = b.delta * b.delta;
  const Scalar denom = pow(d2 + r2, Scalar(N) / 2);
  if (h == 0) {
    return b.dims.alphaN * b.dims.half_gap() * pow(b.delta, Scalar(N - 4) / 2) * (r2 - d2) / denom;
  }
  return b.dims.alphaN * Scalar(N - 2) * pow(b.delta, b.dims.half_gap()) * diff(h - 1) / denom;
}

/// -Delta U - U^p evaluated through the analytic radial Laplacian U'' + (N-1)/r U'.
template <typename Scalar, typename Derived>
Scalar bubble_residual(const BubbleParams<Scalar>& b, const Eigen::MatrixBase<Derived>& x) {
  using std::pow;
  const Scalar r = (x - b.xi).norm();
  const auto d = bubble_profile_derivatives(b.dims, b.delta, r);
  // At r = 0 the profile is smooth and even, so U'/r -> U''(0).
  const Scalar lap = r > Scalar(0) ? d.second + Scalar(b.dims.N - 1) * d.first / r : Scalar(b.dims.N) * d.second;
  return -lap - pow(d.value, b.dims.p);
}

/// Finite-difference Laplacian of f at x with a fourth-order central five-point stencil per axis.
template <typename Scalar>
Scalar fd_laplacian(const std::function<Scalar(const Vector<Scalar>&)>& f, const Vector<Scalar>& x, Scalar step) {
  const Scalar center = f(x);
  Scalar lap = 0;
  Vector<Scalar> y = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Scalar ring[4];
    const Scalar shifts[4] = {-2 * step, -step, step, 2 * step};
    for (int k = 0; k < 4; ++k) {
      y(i) = x(i) + shifts[k];
      ring[k] = f(y);
    }
    y(i) = x(i);
    lap += (-ring[0] + 16 * ring[1] - 30 * center + 16 * ring[2] - ring[3]) / (12 * step * step);
  }
  return lap;
}

/// Sample grid used by linearized_residual: a tensor grid of offsets around xi
/// scaled by delta (five offsets per axis, including the center).
template <typename Scalar>
std::vector<Vector<Scalar>> kernel_sample_points(const BubbleParams<Scalar>& b) {
  static constexpr double offsets[] = {-1.7, -0.6, 0.0, 0.4, 1.3};
  const int N = b.dims.N;
  std::vector<Vector<Scalar>> pts;
  std::vector<int> idx(N, 0);
  while (true) {
    Vector<Scalar> x = b.xi;
    for (int i = 0; i < N; ++i) x(i) += b.delta * Scalar(offsets[idx[i]]);
    pts.push_back(std::move(x));
    int k = 0;
    while (k < N && ++idx[k] == 5) idx[k++] = 0;
    if (k == N) break;
  }
  return pts;
}

/// sup over points of |-Delta f - p U^{p-1} f| with Delta computed by finite differences.
template <typename Scalar>
Scalar linearized_residual_of(const std::function<Scalar(const Vector<Scalar>&)>& f, const BubbleParams<Scalar>& b,
                              const std::vector<Vector<Scalar>>& points, Scalar step) {
  using std::abs;
  using std::pow;
  Scalar worst = 0;
  for (const auto& x : points) {
    const Scalar u = bubble_eval(b, x);
    const Scalar res = -fd_laplacian<Scalar>(f, x, step) - b.dims.p * pow(u, b.dims.p - 1) * f(x);
    worst = std::max(worst, abs(res));
  }
  return worst;
}

/// How well psi^h solves the linearized equation -Delta phi = p U^{p-1} phi, measured on
/// kernel_sample_points with a central stencil of step 2e-3 delta.
template <typename Scalar>
Scalar linearized_residual(const BubbleParams<Scalar>& b, int h) {
  if (h < 0 || h > b.dims.N) throw std::out_of_range("kernel index out of range");
  const std::function<Scalar(const Vector<Scalar>&)> psi = [&](const Vector<Scalar>& x) { return psi_eval(b, h, x); };
  return linearized_residual_of<Scalar>(psi, b, kernel_sample_points(b), Scalar(2e-3) * b.delta);
}

}  // namespace coron
