#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "coron/dimension.hpp"
#include "coron/errors.hpp"
#include "coron/types.hpp"

namespace coron {

/// Ball ambient domain B_R(c).
template <typename Scalar = double>
struct Ball {
  Vector<Scalar> center;
  Scalar radius{1};

  Ball(Vector<Scalar> c, Scalar r) : center(std::move(c)), radius(r) {
    if (!(radius > Scalar(0))) throw std::invalid_argument("ball radius must be positive");
  }
  static Ball unit(int N) { return Ball(Vector<Scalar>::Zero(N), Scalar(1)); }

  int dim() const { return static_cast<int>(center.size()); }

  // Coordinates rescaled to the unit ball.
  template <typename Derived>
  Vector<Scalar> to_unit(const Eigen::MatrixBase<Derived>& x) const {
    return (x - center) / radius;
  }

  template <typename Derived>
  Scalar distance_to_boundary(const Eigen::MatrixBase<Derived>& x) const {
    return radius - (x - center).norm();
  }
};

/// Small hole B_{r eps}(a) removed from the ambient domain.
template <typename Scalar = double>
struct HoleSpec {
  Vector<Scalar> center;
  Scalar radius_coeff{1};
};

/// Omega_eps = B_R(c) minus the union of B_{r_i eps}(a_i).
template <typename Scalar = double>
struct PerforatedDomain {
  Ball<Scalar> ambient;
  std::vector<HoleSpec<Scalar>> holes;
  Scalar epsilon{};

  /// Human-readable violations of the geometric invariants; empty when the domain is valid.
  std::vector<std::string> violations() const {
    std::vector<std::string> out;
    if (!(epsilon > Scalar(0))) out.push_back("epsilon must be positive");
    for (std::size_t i = 0; i < holes.size(); ++i) {
      const auto& h = holes[i];
      const std::string tag = "hole " + std::to_string(i);
      if (h.center.size() != ambient.dim()) {
        out.push_back(tag + ": center has wrong dimension");
        continue;
      }
      if (!(h.radius_coeff > Scalar(0))) out.push_back(tag + ": radius coefficient must be positive");
      const Scalar dist = ambient.distance_to_boundary(h.center);
      if (!(dist > Scalar(0))) {
        out.push_back(tag + ": center is not interior to the ambient ball");
      } else if (!(h.radius_coeff * epsilon < dist / 2)) {
        out.push_back(tag + ": radius r*eps must be below half the distance to the boundary");
      }
      for (std::size_t j = 0; j < i; ++j) {
        const auto& g = holes[j];
        if (g.center.size() != h.center.size()) continue;
        if (!((h.center - g.center).norm() > (h.radius_coeff + g.radius_coeff) * epsilon)) {
          out.push_back(tag + ": overlaps hole " + std::to_string(j));
        }
      }
    }
    return out;
  }
};

namespace detail {

template <typename Scalar>
void require_in_ball(const Ball<Scalar>& ball, const Vector<Scalar>& unit_pt, bool allow_boundary, const char* what) {
  const Scalar n2 = unit_pt.squaredNorm();
  const Scalar slack = allow_boundary ? Scalar(1e-12) : Scalar(0);
  const bool ok = allow_boundary ? n2 <= 1 + slack : n2 < 1;
  if (!ok) throw DomainError(std::string(what) + " lies outside the ball");
  (void)ball;
}

}  // namespace detail

/// Regular part of the Newtonian kernel |x-y|^{2-N} for the ball: the harmonic function of x
/// agreeing with |x-y|^{2-N} on the boundary. Kelvin image form, symmetric in (x, y):
///   R^{2-N} (|x'|^2 |y'|^2 - 2 x'.y' + 1)^{(2-N)/2},   x' = (x-c)/R.
template <typename Scalar, typename DerivedX, typename DerivedY>
Scalar kernel_regular_part(const Ball<Scalar>& ball, const Eigen::MatrixBase<DerivedX>& x,
                           const Eigen::MatrixBase<DerivedY>& y) {
  using std::pow;
  const Vector<Scalar> xu = ball.to_unit(x);
  const Vector<Scalar> yu = ball.to_unit(y);
  detail::require_in_ball(ball, xu, true, "x");
  detail::require_in_ball(ball, yu, true, "y");
  const Scalar q = xu.squaredNorm() * yu.squaredNorm() - 2 * xu.dot(yu) + 1;
  const int N = ball.dim();
  if (!(q > Scalar(0))) return std::numeric_limits<Scalar>::infinity();
  return pow(ball.radius, Scalar(2 - N)) * pow(q, Scalar(2 - N) / 2);
}

/// Regular part H(x,y) of the Dirichlet Green function of the ball, with
/// G(x,y) = cN |x-y|^{2-N} - H(x,y) and cN = 1/(N(N-2) omega_N). H is positive.
template <typename Scalar, typename DerivedX, typename DerivedY>
Scalar green_regular_part(const Ball<Scalar>& ball, const Eigen::MatrixBase<DerivedX>& x,
                          const Eigen::MatrixBase<DerivedY>& y) {
  const auto dims = DimensionConstants<Scalar>::make(ball.dim());
  const Vector<Scalar> yu = ball.to_unit(y);
  detail::require_in_ball(ball, yu, false, "y");
  return dims.cN() * kernel_regular_part(ball, x, y);
}

template <typename Scalar, typename DerivedX, typename DerivedY>
Scalar green_function(const Ball<Scalar>& ball, const Eigen::MatrixBase<DerivedX>& x,
                      const Eigen::MatrixBase<DerivedY>& y) {
  using std::pow;
  const auto dims = DimensionConstants<Scalar>::make(ball.dim());
  return dims.cN() * pow((x - y).norm(), Scalar(2 - ball.dim())) - green_regular_part(ball, x, y);
}

/// Robin function H(a,a) in the Green-function normalization. Blows up at the boundary.
template <typename Scalar, typename Derived>
Scalar robin_function(const Ball<Scalar>& ball, const Eigen::MatrixBase<Derived>& a) {
  const Vector<Scalar> au = ball.to_unit(a);
  detail::require_in_ball(ball, au, false, "a");
  return green_regular_part(ball, a, a);
}

/// Robin function of the Newtonian kernel, H(a,a)/cN. This is the normalization entering the
/// projection expansion P U - U ~ -alphaN delta^{(N-2)/2} H(x, xi) and the reduced energy.
template <typename Scalar, typename Derived>
Scalar kernel_robin(const Ball<Scalar>& ball, const Eigen::MatrixBase<Derived>& a) {
  const Vector<Scalar> au = ball.to_unit(a);
  detail::require_in_ball(ball, au, false, "a");
  return kernel_regular_part(ball, a, a);
}

/// Max of |Delta_x H(x,y)| over a grid of points in the ball, with a central
/// finite-difference Laplacian of step 1e-3 R. Grid points closer than four steps
/// to the boundary are skipped.
template <typename Scalar, typename Derived>
Scalar harmonicity_check(const Ball<Scalar>& ball, const Eigen::MatrixBase<Derived>& y, int per_axis = 7) {
  using std::abs;
  const Vector<Scalar> yv = y;
  const Vector<Scalar> yu = ball.to_unit(yv);
  detail::require_in_ball(ball, yu, false, "y");
  const int N = ball.dim();
  const Scalar h = Scalar(1e-3) * ball.radius;
  const auto H = [&](const Vector<Scalar>& x) { return green_regular_part(ball, x, yv); };
  Scalar worst = 0;
  std::vector<int> idx(N, 0);
  while (true) {
    Vector<Scalar> x = ball.center;
    for (int i = 0; i < N; ++i) {
      x(i) += ball.radius * (Scalar(-0.9) + Scalar(1.8) * Scalar(idx[i]) / Scalar(per_axis - 1));
    }
    if (ball.distance_to_boundary(x) > 4 * h) {
      const Scalar center = H(x);
      Scalar lap = 0;
      Vector<Scalar> z = x;
      for (int i = 0; i < N; ++i) {
        z(i) = x(i) + h;
        const Scalar fp = H(z);
        z(i) = x(i) - h;
        const Scalar fm = H(z);
        z(i) = x(i);
        lap += (fp - 2 * center + fm) / (h * h);
      }
      worst = std::max(worst, abs(lap));
    }
    int k = 0;
    while (k < N && ++idx[k] == per_axis) idx[k++] = 0;
    if (k == N) break;
  }
  return worst;
}

}  // namespace coron
