#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "coron/fit.hpp"

using namespace coron;

TEST_CASE("exact line") {
  VectorXd x(5), y(5);
  x << 0, 1, 2, 3, 4;
  y = 2.5 * x.array() - 1;
  const auto f = fit_line(x, y);
  CHECK(f.slope == doctest::Approx(2.5).epsilon(1e-14));
  CHECK(f.intercept == doctest::Approx(-1).epsilon(1e-14));
  CHECK(f.r2 == doctest::Approx(1.0));
}

TEST_CASE("line with noise keeps r2 below one") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0, 0.1);
  VectorXd x = VectorXd::LinSpaced(50, 0, 5), y(50);
  for (int i = 0; i < 50; ++i) y(i) = -x(i) + n(rng);
  const auto f = fit_line(x, y);
  CHECK(f.slope == doctest::Approx(-1).epsilon(0.05));
  CHECK(f.r2 < 1);
  CHECK(f.r2 > 0.98);
}

TEST_CASE("log-log recovers a power law") {
  const VectorXd x = geometric_grid(1e-1, 1e-4, 12);
  const VectorXd y = 3.0 * x.array().pow(1.5);
  const auto f = fit_loglog(x, y);
  CHECK(f.slope == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(std::exp(f.intercept) == doctest::Approx(3.0).epsilon(1e-12));
  VectorXd bad = y;
  bad(3) = 0;
  CHECK_THROWS_AS(fit_loglog(x, bad), std::invalid_argument);
}

TEST_CASE("size checks") {
  CHECK_THROWS_AS(fit_line(VectorXd::Ones(3), VectorXd::Ones(4)), std::invalid_argument);
  CHECK_THROWS_AS(fit_line(VectorXd::Ones(1), VectorXd::Ones(1)), std::invalid_argument);
}

TEST_CASE("geometric grid") {
  const VectorXd g = geometric_grid(1e-1, 1e-4, 4);
  REQUIRE(g.size() == 4);
  CHECK(g(0) == doctest::Approx(1e-1));
  CHECK(g(1) == doctest::Approx(1e-2));
  CHECK(g(3) == doctest::Approx(1e-4));
  for (int i = 1; i < 4; ++i) CHECK(g(i) / g(i - 1) == doctest::Approx(0.1));
}

TEST_CASE("power-log fit separates the exponent from the logarithm") {
  const VectorXd x = geometric_grid(1e-1, 1e-4, 12);
  for (double s : {-3.0, 0.5, 2.0}) {
    for (double A : {0.0, 1.0, 4.0}) {
      const VectorXd y = x.array().pow(s) * (A * x.array().log().abs() + 2.0);
      const auto f = fit_power_log(x, y, s - 2, s + 2);
      CHECK(f.exponent == doctest::Approx(s).epsilon(1e-5));
      CHECK(f.log_coeff == doctest::Approx(A).epsilon(1e-4).scale(1));
      CHECK(f.constant == doctest::Approx(2.0).epsilon(1e-4));
    }
  }
}
