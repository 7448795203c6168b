#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "coron/fit.hpp"
#include "coron/radial_solver.hpp"
#include "coron/reduced_energy.hpp"

using namespace coron;

namespace {

double relative_residual(const RadialGrid& g, double mu = 1) {
  return discrete_residual(g, mu).cwiseAbs().maxCoeff() / residual_scale(g, mu);
}

}  // namespace

TEST_CASE("log grid spans the annulus geometrically") {
  const auto g = make_log_grid(Dims::make(4), 1e-3, 1.0, 31);
  REQUIRE(g.size() == 31);
  CHECK(g.nodes(0) == doctest::Approx(1e-3));
  CHECK(g.nodes(30) == doctest::Approx(1.0));
  for (int i = 2; i < 31; ++i) {
    CHECK(g.nodes(i) / g.nodes(i - 1) == doctest::Approx(g.nodes(1) / g.nodes(0)).epsilon(1e-10));
  }
}

TEST_CASE("converged profile is positive, single-peaked and solves the discrete system") {
  const auto dims = Dims::make(4);
  const auto res = solve_radial_ansatz(dims, 1.0, 1.0, 1e-3);
  REQUIRE(res.status == SolveStatus::converged);
  CHECK(res.iterations <= 50);
  CHECK(relative_residual(res.grid) < 1e-10);
  const VectorXd& u = res.grid.values;
  const auto n = u.size();
  CHECK(u(0) == 0.0);
  CHECK(u(n - 1) == 0.0);
  CHECK((u.segment(1, n - 2).array() > 0).all());
  Eigen::Index peak;
  u.maxCoeff(&peak);
  for (Eigen::Index i = 1; i <= peak; ++i) CHECK(u(i) >= u(i - 1));
  for (Eigen::Index i = peak + 1; i < n; ++i) CHECK(u(i) <= u(i - 1));
  CHECK(res.metrics.d_est > 0.5);
  CHECK(res.metrics.d_est < 2);
}

TEST_CASE("zero initial guess stays on the trivial branch") {
  const auto dims = Dims::make(4);
  auto g = make_log_grid(dims, 1e-3, 1.0, 400);
  g.values.setZero();
  const auto res = solve_radial(dims, 1.0, 1.0, 1e-3, g);
  CHECK(res.status == SolveStatus::trivial_branch);
}

TEST_CASE("mesh refinement moves delta_est by less than one percent") {
  const auto dims = Dims::make(4);
  RadialSolverOptions coarse, fine;
  fine.nodes = 4000;
  const auto a = solve_radial_ansatz(dims, 1.0, 1.0, 1e-3, coarse);
  const auto b = solve_radial_ansatz(dims, 1.0, 1.0, 1e-3, fine);
  REQUIRE(a.status == SolveStatus::converged);
  REQUIRE(b.status == SolveStatus::converged);
  CHECK(a.metrics.delta_est == doctest::Approx(b.metrics.delta_est).epsilon(0.01));
}

TEST_CASE("three-dimensional solve converges") {
  const auto res = solve_radial_ansatz(Dims::make(3), 1.0, 1.0, 1e-3);
  CHECK(res.status == SolveStatus::converged);
  CHECK(relative_residual(res.grid) < 1e-10);
}

TEST_CASE("concentration rate and limit") {
  const auto dims = Dims::make(4);
  const VectorXd grid = geometric_grid(1e-2, 1e-4, 8);
  const auto rep = rate_sweep(dims, 1.0, 1.0, grid);
  REQUIRE(rep.complete);
  CHECK(rep.slope == doctest::Approx(0.5).epsilon(0.1));
  CHECK(rep.r2 > 0.99);
  CHECK(rep.d_tilde == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.d_limit == doctest::Approx(rep.d_tilde).epsilon(0.2));
  CHECK(rep.d_spread < 0.05);
}

TEST_CASE("d_est does not depend on how the hole size is split between r and epsilon") {
  // the hole radius is r eps and delta = d sqrt(eps): doubling r at fixed r eps
  // rescales d_est by sqrt(2), i.e. d_est / r^{1/2} is invariant
  const auto dims = Dims::make(4);
  const auto a = solve_radial_ansatz(dims, 1.0, 1.0, 1e-3);
  const auto b = solve_radial_ansatz(dims, 1.0, 2.0, 5e-4);
  REQUIRE(a.status == SolveStatus::converged);
  REQUIRE(b.status == SolveStatus::converged);
  CHECK(a.metrics.delta_est == doctest::Approx(b.metrics.delta_est).epsilon(1e-8));
  CHECK(b.metrics.d_est / std::sqrt(2.0) == doctest::Approx(a.metrics.d_est).epsilon(0.02));
}

TEST_CASE("scalar profile composes into a group solution") {
  const auto dims = Dims::make(4);
  const auto w = solve_radial_ansatz(dims, 1.0, 1.0, 1e-3);
  REQUIRE(w.status == SolveStatus::converged);
  VectorXd mu(2);
  mu << 1, 2;
  MatrixXd beta(2, 2);
  beta << 1, -0.5, -0.5, 2;
  const auto spec = CouplingSpec::make(4, mu, beta, {0, 2});
  const auto cv = solve_c_vector(spec, 0);
  const auto comp = compose_group_solution(spec, cv, w.grid);
  CHECK(comp.identity_gap.maxCoeff() < 1e-8);
  CHECK(comp.scalar_residual / residual_scale(w.grid) < 1e-10);
  for (int i = 0; i < 2; ++i) {
    CHECK(comp.components[i].values.isApprox(cv.c(i) * w.grid.values));
  }

  auto perturbed = cv;
  perturbed.c(0) *= 1.01;
  const auto bad = compose_group_solution(spec, perturbed, w.grid);
  CHECK(bad.residual_sup.maxCoeff() > 100 * comp.residual_sup.maxCoeff());

  const auto single = CouplingSpec::make(4, VectorXd::Ones(1), MatrixXd::Ones(1, 1));
  const auto sc = compose_group_solution(single, solve_c_vector(single, 0), w.grid);
  CHECK(sc.components[0].values.isApprox(w.grid.values));
  CHECK(sc.residual_sup(0) == doctest::Approx(sc.scalar_residual));
}

TEST_CASE("discrete energy") {
  const auto dims = Dims::make(4);
  auto g = make_log_grid(dims, 1e-3, 1.0, 200);
  g.values.setZero();
  CHECK(radial_energy(g) == 0.0);

  const auto w = solve_radial_ansatz(dims, 1.0, 1.0, 1e-3);
  REQUIRE(w.status == SolveStatus::converged);
  const auto spec = CouplingSpec::make(4, VectorXd::Ones(1), MatrixXd::Ones(1, 1));
  CHECK(energy_of_solution({w.grid}, spec) == doctest::Approx(radial_energy(w.grid)).epsilon(1e-12));
  // a concentrating solution carries at least the bubble energy b1 and not much more
  const double b1 = constant_b1(dims);
  CHECK(w.metrics.energy > b1);
  CHECK(w.metrics.energy < 1.1 * b1);
}
