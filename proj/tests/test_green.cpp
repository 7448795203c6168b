#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "coron/green.hpp"

using namespace coron;

namespace {

VectorXd random_in_ball(std::mt19937_64& rng, const Ball<double>& b, double frac) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  VectorXd x(b.dim());
  for (auto& v : x) v = g(rng);
  return b.center + x.normalized() * b.radius * frac * u(rng);
}

}  // namespace

TEST_CASE("regular part is symmetric") {
  std::mt19937_64 rng(3);
  for (int N : {3, 4}) {
    VectorXd c = VectorXd::Constant(N, 0.5);
    const Ball<double> ball(c, 2.0);
    for (int k = 0; k < 50; ++k) {
      const VectorXd x = random_in_ball(rng, ball, 0.95);
      const VectorXd y = random_in_ball(rng, ball, 0.95);
      CHECK(green_regular_part(ball, x, y) == doctest::Approx(green_regular_part(ball, y, x)).epsilon(1e-12));
    }
  }
}

TEST_CASE("Green function vanishes on the boundary") {
  std::mt19937_64 rng(4);
  for (int N : {3, 4}) {
    const Ball<double> ball(VectorXd::Zero(N), 1.5);
    const VectorXd y = random_in_ball(rng, ball, 0.8);
    for (int k = 0; k < 20; ++k) {
      VectorXd x = random_in_ball(rng, ball, 1.0);
      x = ball.center + (x - ball.center).normalized() * ball.radius;
      const double scale = Dims::make(N).cN() * std::pow((x - y).norm(), 2 - N);
      CHECK(std::abs(green_function(ball, x, y)) < 1e-12 * scale);
    }
  }
}

TEST_CASE("regular part is harmonic in x") {
  for (int N : {3, 4}) {
    const Ball<double> ball(VectorXd::Zero(N), 1.0);
    VectorXd y = VectorXd::Zero(N);
    y(0) = 0.3;
    CHECK(harmonicity_check(ball, y) < 1e-4);
  }
}

TEST_CASE("Robin function closed forms") {
  for (int N : {3, 4}) {
    const auto dims = Dims::make(N);
    const double R = 1.7;
    const Ball<double> ball(VectorXd::Zero(N), R);
    CHECK(robin_function(ball, VectorXd::Zero(N)) == doctest::Approx(dims.cN() * std::pow(R, 2 - N)));
    // Kelvin oracle off-center: R^{2-N} (1 - |a/R|^2)^{2-N}
    VectorXd a = VectorXd::Zero(N);
    a(1) = 0.9;
    const double s = 0.9 / R;
    CHECK(kernel_robin(ball, a) == doctest::Approx(std::pow(R, 2 - N) * std::pow(1 - s * s, 2 - N)).epsilon(1e-13));
  }
}

TEST_CASE("Robin function blows up at the boundary") {
  const Ball<double> ball = Ball<double>::unit(4);
  double prev = 0;
  for (double t : {0.5, 0.9, 0.99, 0.999}) {
    VectorXd a = VectorXd::Zero(4);
    a(0) = t;
    const double h = robin_function(ball, a);
    CHECK(h > prev);
    prev = h;
  }
  CHECK(prev > 1e4 * robin_function(ball, VectorXd::Zero(4)));
}

TEST_CASE("points outside the ball are rejected") {
  const Ball<double> ball = Ball<double>::unit(3);
  VectorXd out = VectorXd::Zero(3);
  out(2) = 1.1;
  CHECK_THROWS_AS(green_regular_part(ball, out, VectorXd::Zero(3)), DomainError);
  CHECK_THROWS_AS(robin_function(ball, out), DomainError);
  VectorXd edge = VectorXd::Zero(3);
  edge(0) = 1.0;
  CHECK_THROWS_AS(robin_function(ball, edge), DomainError);
  CHECK_NOTHROW(green_regular_part(ball, edge, VectorXd::Zero(3)));
}

TEST_CASE("perforated domain invariants") {
  const Ball<double> ball = Ball<double>::unit(4);
  PerforatedDomain<double> dom{ball, {}, 1e-2};
  VectorXd a = VectorXd::Zero(4), b = VectorXd::Zero(4);
  a(0) = 0.3;
  b(0) = -0.3;
  dom.holes = {{a, 1.0}, {b, 1.0}};
  CHECK(dom.violations().empty());

  auto touching = dom;
  touching.holes[0].center(0) = 0.999;
  CHECK_FALSE(touching.violations().empty());

  auto overlap = dom;
  overlap.holes[1].center = a;
  CHECK_FALSE(overlap.violations().empty());

  auto bad_eps = dom;
  bad_eps.epsilon = 0;
  CHECK_FALSE(bad_eps.violations().empty());
}
