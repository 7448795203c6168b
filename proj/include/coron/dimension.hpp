#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "coron/errors.hpp"

namespace coron {

/// Constants attached to the space dimension N of the critical problem.
///
/// `alphaN` is the bubble normalization making U = alphaN (d/(d^2+|x|^2))^{(N-2)/2}
/// an exact solution of -Delta U = U^p; it satisfies alphaN^{p-1} = N(N-2).
template <typename Scalar = double>
struct DimensionConstants {
  int N = 0;
  Scalar p{};         // critical exponent (N+2)/(N-2)
  Scalar alphaN{};    // bubble normalization
  Scalar omegaN{};    // volume of the unit ball in R^N
  Scalar omegaNm1{};  // area of the unit sphere S^{N-1}

  static DimensionConstants make(int n) {
    if (n != 3 && n != 4) {
      throw UnsupportedDimensionError("dimension must be 3 or 4, got " + std::to_string(n));
    }
    using std::pow;
    DimensionConstants d;
    d.N = n;
    d.p = Scalar(n + 2) / Scalar(n - 2);
    d.alphaN = pow(Scalar(n * (n - 2)), Scalar(n - 2) / Scalar(4));
    const Scalar pi = std::numbers::pi_v<Scalar>;
    d.omegaN = pow(pi, Scalar(n) / 2) / std::tgamma(Scalar(n) / 2 + 1);
    d.omegaNm1 = Scalar(n) * d.omegaN;
    return d;
  }

  // (N-2)/2, the decay exponent of the bubble profile in delta/(delta^2+r^2).
  Scalar half_gap() const { return Scalar(N - 2) / 2; }

  // Normalization of the fundamental solution: G_0(x) = cN |x|^{2-N}.
  Scalar cN() const { return Scalar(1) / (Scalar(N * (N - 2)) * omegaN); }
};

using Dims = DimensionConstants<double>;

}  // namespace coron
