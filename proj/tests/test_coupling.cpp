#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "coron/coupling.hpp"
#include "coron/dimension.hpp"
#include "coron/errors.hpp"

using namespace coron;

namespace {

CouplingSpec pair_spec(int N, double mu1, double mu2, double b) {
  VectorXd mu(2);
  mu << mu1, mu2;
  MatrixXd beta(2, 2);
  beta << mu1, b, b, mu2;
  return CouplingSpec::make(N, mu, beta, {0, 2});
}

// Random symmetric block with positive entries and a positive amplitude solution.
std::optional<CouplingSpec> random_positive_block(std::mt19937_64& rng, int k) {
  std::uniform_real_distribution<double> u(0.1, 3.0);
  MatrixXd B(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = i; j < k; ++j) B(i, j) = B(j, i) = u(rng);
  const auto spec = CouplingSpec::make(4, B.diagonal(), B, {0, k});
  Eigen::FullPivLU<MatrixXd> lu(B);
  if (!lu.isInvertible()) return std::nullopt;
  const VectorXd sq = lu.solve(VectorXd::Ones(k));
  if (!(sq.array() > 1e-3).all()) return std::nullopt;
  return spec;
}

}  // namespace

TEST_CASE("two-component closed form") {
  const auto spec = pair_spec(4, 1, 2, -0.5);
  const auto c = solve_c_vector(spec, 0);
  CHECK(c.c(0) * c.c(0) == doctest::Approx(10.0 / 7).epsilon(1e-13));
  CHECK(c.c(1) * c.c(1) == doctest::Approx(6.0 / 7).epsilon(1e-13));
  // c_1^2 = (mu2 - b)/(mu1 mu2 - b^2)
  CHECK(c.c(0) * c.c(0) == doctest::Approx((2 + 0.5) / (2 - 0.25)).epsilon(1e-13));
  CHECK(c.residual < 1e-12);
  CHECK_FALSE(c.on_boundary);
}

TEST_CASE("equal self-couplings give equal amplitudes") {
  for (double b : {-0.4, 0.3, 2.0}) {
    const auto c = solve_c_vector(pair_spec(4, 1.3, 1.3, b), 0);
    CHECK(c.c(0) * c.c(0) == doctest::Approx(1 / (1.3 + b)).epsilon(1e-13));
    CHECK(c.c(1) == doctest::Approx(c.c(0)).epsilon(1e-14));
  }
}

TEST_CASE("single component amplitude is mu^{-1/(p-1)}") {
  for (int N : {3, 4}) {
    const auto spec = CouplingSpec::make(N, VectorXd::Constant(1, 2.5), MatrixXd::Constant(1, 1, 2.5));
    const auto c = solve_c_vector(spec, 0);
    CHECK(c.c(0) == doctest::Approx(std::pow(2.5, -1 / (Dims::make(N).p - 1))).epsilon(1e-14));
  }
}

TEST_CASE("randomized admissible specs solve the amplitude system") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.2, 3.0);
  int solved = 0;
  for (int draw = 0; draw < 400 && solved < 100; ++draw) {
    const double mu1 = u(rng), mu2 = u(rng);
    std::uniform_real_distribution<double> lo(-std::sqrt(mu1 * mu2) * 0.99, std::min(mu1, mu2) * 0.99);
    const double b = draw % 2 ? lo(rng) : std::max(mu1, mu2) + u(rng);
    REQUIRE(admissible_beta_range(mu1, mu2, b));
    for (int N : {3, 4}) {
      const auto c = solve_c_vector(pair_spec(N, mu1, mu2, b), 0);
      CHECK(c.residual < 1e-10);
      CHECK((c.c.array() > 0).all());
    }
    ++solved;
  }
  CHECK(solved == 100);
}

TEST_CASE("three-dimensional amplitudes satisfy c_i sum_j beta_ij c_j^3 = 1") {
  const auto spec = pair_spec(3, 1, 2, -0.5);
  const auto c = solve_c_vector(spec, 0);
  const MatrixXd B = spec.block(0);
  const VectorXd lhs = c.c.array() * (B * VectorXd(c.c.array().cube())).array();
  CHECK((lhs.array() - 1).abs().maxCoeff() < 1e-12);
}

TEST_CASE("singular and non-positive blocks") {
  CHECK_THROWS_AS(solve_c_vector(pair_spec(4, 1, 1, 1), 0), SingularBlockError);
  // beta between mu1 and mu2 gives c_1^2 < 0
  try {
    solve_c_vector(pair_spec(4, 1, 2, 1.5), 0);
    FAIL("expected NoPositiveSolutionError");
  } catch (const NoPositiveSolutionError& e) {
    REQUIRE(e.powers().size() == 2);
    CHECK(e.powers()[0] < 0);
  }
}

TEST_CASE("beta equal to mu1 sits on the boundary and is degenerate") {
  const auto spec = pair_spec(4, 1, 2, 1);
  CHECK_THROWS_AS(solve_c_vector(spec, 0), NoPositiveSolutionError);
  const auto c = solve_c_vector(spec, 0, CSolvePolicy::allow_boundary);
  CHECK(c.on_boundary);
  CHECK(c.c(1) == 0.0);
  const auto rep = build_spectrum(spec, c);
  CHECK(rep.verdict == Verdict::degenerate);
  CHECK(rep.reason == "degenerate: λ₂ = 1");
  CHECK(rep.lambdas.minCoeff() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("admissible beta range") {
  CHECK(admissible_beta_range(1, 2, -0.5));
  CHECK_FALSE(admissible_beta_range(1, 2, 1));
  CHECK_FALSE(admissible_beta_range(1, 2, 1.5));
  CHECK(admissible_beta_range(1, 2, 3));
  CHECK_FALSE(admissible_beta_range(1, 2, -std::sqrt(2.0)));
  CHECK_THROWS_AS(admissible_beta_range(0, 2, 1), std::invalid_argument);
}

TEST_CASE("principal eigenvalue is 3 with eigenvector c on random positive blocks") {
  std::mt19937_64 rng(5);
  int draws = 0;
  while (draws < 100) {
    const int k = 2 + draws % 4;
    const auto spec = random_positive_block(rng, k);
    if (!spec) continue;
    const auto c = solve_c_vector(*spec, 0);
    const auto rep = build_spectrum(*spec, c);
    CHECK(rep.principal_lambda == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(std::abs(rep.principal_eigvec.dot(c.c.normalized())) == doctest::Approx(1.0).epsilon(1e-10));
    // Perron-Frobenius: every other eigenvalue of C has modulus below 1
    int near_one = 0;
    for (Eigen::Index i = 0; i < rep.thetas.size(); ++i) {
      if (std::abs(rep.thetas(i) - 1) < 1e-10) {
        ++near_one;
      } else {
        CHECK(std::abs(rep.thetas(i)) < 1);
      }
    }
    CHECK(near_one == 1);
    ++draws;
  }
}

TEST_CASE("determinant of C factors through the coupling block") {
  std::mt19937_64 rng(8);
  int draws = 0;
  while (draws < 50) {
    const auto spec = random_positive_block(rng, 3);
    if (!spec) continue;
    const auto rep = build_spectrum(*spec, solve_c_vector(*spec, 0));
    // C = diag(c) beta diag(c), so det C = (prod c_i^2) det beta
    CHECK(rep.det_C == doctest::Approx(rep.prod_c2 * rep.det_beta).epsilon(1e-10));
    ++draws;
  }
}

TEST_CASE("two-by-two spectrum matches the quadratic formula and trace/determinant") {
  for (double b : {-0.5, 0.3, 3.0}) {
    const auto spec = pair_spec(4, 1, 2, b);
    const auto c = solve_c_vector(spec, 0);
    const auto rep = build_spectrum(spec, c);
    REQUIRE(rep.m2_closed_form);
    const double hi = std::max(rep.m2_closed_form->first, rep.m2_closed_form->second);
    const double lo = std::min(rep.m2_closed_form->first, rep.m2_closed_form->second);
    CHECK(rep.lambdas.maxCoeff() == doctest::Approx(hi).epsilon(1e-12));
    CHECK(rep.lambdas.minCoeff() == doctest::Approx(lo).epsilon(1e-12));
    CHECK(rep.lambdas.sum() == doctest::Approx(rep.matM.trace()).epsilon(1e-12));
    CHECK(rep.lambdas.prod() == doctest::Approx(rep.matM.determinant()).epsilon(1e-10));
    // lambda_{1,2} = (6 - 2 b s +- 2 b s)/2 with s = c1^2 + c2^2
    const double s = c.c.squaredNorm();
    const double other = 3 - 2 * b * s;
    CHECK(std::min(std::abs(rep.lambdas(0) - other), std::abs(rep.lambdas(1) - other)) < 1e-10);
  }
}

TEST_CASE("verdicts") {
  SUBCASE("positive block above both mu is nondegenerate") {
    const auto spec = pair_spec(4, 1, 2, 3);
    const auto c = solve_c_vector(spec, 0);
    CHECK(c.c(0) * c.c(0) == doctest::Approx(1.0 / 7).epsilon(1e-13));
    CHECK(c.c(1) * c.c(1) == doctest::Approx(2.0 / 7).epsilon(1e-13));
    const auto rep = build_spectrum(spec, c);
    CHECK(rep.verdict == Verdict::nondegenerate);
    const double l2 = rep.lambdas.minCoeff();
    CHECK(l2 > -1);
    CHECK(l2 < 3);
    CHECK(std::abs(l2 - 1) > 1e-8);
  }
  SUBCASE("negative coupling pushes lambda_2 above 3") {
    const auto rep = build_spectrum(pair_spec(4, 1, 2, -0.5), solve_c_vector(pair_spec(4, 1, 2, -0.5), 0));
    CHECK(rep.lambdas.maxCoeff() == doctest::Approx(37.0 / 7).epsilon(1e-12));
    CHECK(rep.verdict == Verdict::inconclusive);
  }
  SUBCASE("single component") {
    const auto spec = CouplingSpec::make(4, VectorXd::Constant(1, 2.0), MatrixXd::Constant(1, 1, 2.0));
    const auto rep = build_spectrum(spec, solve_c_vector(spec, 0));
    CHECK(rep.lambdas(0) == doctest::Approx(3.0));
    CHECK(rep.verdict == Verdict::nondegenerate);
  }
  SUBCASE("beta equal to mu2") {
    const auto spec = pair_spec(4, 1, 2, 2);
    const auto rep = build_spectrum(spec, solve_c_vector(spec, 0, CSolvePolicy::allow_boundary));
    CHECK(rep.verdict == Verdict::degenerate);
  }
}

TEST_CASE("spectrum is four-dimensional only and checks sizes") {
  const auto spec3 = pair_spec(3, 1, 2, -0.5);
  CHECK_THROWS_AS(build_spectrum(spec3, solve_c_vector(spec3, 0)), UnsupportedDimensionError);
  const auto spec4 = pair_spec(4, 1, 2, -0.5);
  CVector wrong;
  wrong.c = VectorXd::Ones(3);
  CHECK_THROWS_AS(build_spectrum(spec4, wrong), std::invalid_argument);
}

TEST_CASE("eigenvalue ladder prefix") {
  constexpr auto ladder = eigenvalue_ladder();
  static_assert(ladder.size() == 2);
  CHECK(ladder[0] == 1.0);
  CHECK(ladder[1] == 3.0);
  CHECK(ladder[0] < ladder[1]);
}

TEST_CASE("spec violations") {
  VectorXd mu(2);
  mu << 1, -2;
  MatrixXd beta(2, 2);
  beta << 1, 0.3, 0.2, -2;
  auto spec = CouplingSpec::make(4, mu, beta, {0, 2});
  const auto v = spec.violations();
  CHECK(v.size() >= 2);
  CHECK(CouplingSpec::make(4, VectorXd::Ones(3), MatrixXd::Identity(3, 3), {0, 2, 2, 3}).violations().size() == 1);
  CHECK(CouplingSpec::make(4, VectorXd::Ones(3), MatrixXd::Identity(3, 3)).groups() == 3);
}
