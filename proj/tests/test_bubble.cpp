#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "coron/bubble.hpp"

using namespace coron;

namespace {

VectorXd random_point(std::mt19937_64& rng, int N, double scale) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  VectorXd x(N);
  for (int i = 0; i < N; ++i) x(i) = g(rng);
  return x.normalized() * scale * 4 * u(rng);
}

}  // namespace

TEST_CASE("alphaN satisfies alphaN^{p-1} = N(N-2)") {
  for (int N : {3, 4}) {
    const auto d = Dims::make(N);
    CHECK(std::pow(d.alphaN, d.p - 1) == doctest::Approx(N * (N - 2)).epsilon(1e-14));
  }
  CHECK_THROWS_AS(Dims::make(5), UnsupportedDimensionError);
  CHECK_THROWS_AS(Dims::make(2), UnsupportedDimensionError);
}

TEST_CASE("bubble solves -Delta U = U^p at random points") {
  std::mt19937_64 rng(11);
  for (int N : {3, 4}) {
    const auto dims = Dims::make(N);
    for (double delta : {0.3, 1.0, 2.5}) {
      VectorXd xi = VectorXd::LinSpaced(N, -0.2, 0.4);
      const BubbleParams<double> b(delta, xi, dims);
      double worst = 0;
      for (int k = 0; k < 1000; ++k) {
        const VectorXd x = xi + random_point(rng, N, delta);
        worst = std::max(worst, std::abs(bubble_residual(b, x)) * std::pow(delta, (N + 2) / 2.0));
      }
      CHECK(worst < 1e-10);
    }
  }
}

TEST_CASE("bubble residual is finite at the center") {
  const BubbleParams<double> b(1.0, Dims::make(4));
  CHECK(std::abs(bubble_residual(b, VectorXd::Zero(4))) < 1e-12);
}

TEST_CASE("analytic residual agrees with a finite-difference Laplacian") {
  const auto dims = Dims::make(3);
  const BubbleParams<double> b(0.7, dims);
  const std::function<double(const VectorXd&)> U = [&](const VectorXd& x) { return bubble_eval(b, x); };
  VectorXd x(3);
  x << 0.3, -0.2, 0.5;
  const double lap = fd_laplacian<double>(U, x, 1e-4);
  CHECK(-lap - std::pow(U(x), dims.p) == doctest::Approx(0.0).epsilon(1e-5).scale(1.0));
}

TEST_CASE("kernel elements solve the linearized equation") {
  for (int N : {3, 4}) {
    const auto dims = Dims::make(N);
    const BubbleParams<double> b(1.0, VectorXd::Constant(N, 0.1), dims);
    for (int h = 0; h <= N; ++h) CHECK(linearized_residual(b, h) < 1e-6);
  }
}

TEST_CASE("kernel elements are the scale and translation derivatives of U") {
  const auto dims = Dims::make(4);
  const double delta = 0.8;
  VectorXd xi(4);
  xi << 0.1, -0.3, 0.2, 0.0;
  VectorXd x(4);
  x << 0.4, 0.1, -0.5, 0.3;
  const double step = 1e-6;
  const BubbleParams<double> b(delta, xi, dims);
  const double dd = (bubble_eval(BubbleParams<double>(delta + step, xi, dims), x) -
                     bubble_eval(BubbleParams<double>(delta - step, xi, dims), x)) /
                    (2 * step);
  CHECK(psi_eval(b, 0, x) == doctest::Approx(dd).epsilon(1e-7));
  for (int h = 1; h <= 4; ++h) {
    VectorXd xp = xi, xm = xi;
    xp(h - 1) += step;
    xm(h - 1) -= step;
    const double dx = (bubble_eval(BubbleParams<double>(delta, xp, dims), x) -
                       bubble_eval(BubbleParams<double>(delta, xm, dims), x)) /
                      (2 * step);
    CHECK(psi_eval(b, h, x) == doctest::Approx(dx).epsilon(1e-7));
  }
}

TEST_CASE("invalid kernel index and parameters are rejected") {
  const auto dims = Dims::make(3);
  const BubbleParams<double> b(1.0, dims);
  CHECK_THROWS_AS(psi_eval(b, 4, VectorXd::Zero(3)), std::out_of_range);
  CHECK_THROWS_AS(psi_eval(b, -1, VectorXd::Zero(3)), std::out_of_range);
  CHECK_THROWS_AS(BubbleParams<double>(0.0, dims), std::invalid_argument);
  CHECK_THROWS_AS(BubbleParams<double>(1.0, VectorXd::Zero(4), dims), std::invalid_argument);
}

TEST_CASE("bubble is radial and peaks at its center") {
  const auto dims = Dims::make(4);
  const BubbleParams<double> b(0.5, dims);
  CHECK(bubble_eval(b, VectorXd::Zero(4)) == doctest::Approx(dims.alphaN / 0.5));
  VectorXd e1 = VectorXd::Zero(4), e3 = VectorXd::Zero(4);
  e1(0) = 0.7;
  e3(2) = -0.7;
  CHECK(bubble_eval(b, e1) == doctest::Approx(bubble_eval(b, e3)));
  CHECK(bubble_eval(b, e1) < bubble_eval(b, VectorXd::Zero(4)));
}

TEST_CASE("long double instantiation matches double") {
  const auto dl = DimensionConstants<long double>::make(4);
  const BubbleParams<long double> bl(0.5L, dl);
  Vector<long double> x = Vector<long double>::Constant(4, 0.2L);
  const BubbleParams<double> bd(0.5, Dims::make(4));
  CHECK(static_cast<double>(bubble_eval(bl, x)) == doctest::Approx(bubble_eval(bd, VectorXd::Constant(4, 0.2))));
}
