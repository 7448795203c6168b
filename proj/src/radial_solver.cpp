#include "coron/radial_solver.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>

#include "coron/asymptotics.hpp"
#include "coron/errors.hpp"
#include "coron/fit.hpp"
#include "coron/green.hpp"
#include "coron/reduced_energy.hpp"

namespace coron {
namespace {

struct Stencil {
  VectorXd a;  // a_{i+1/2} = s_{i+1/2}^{N-1} / (s_{i+1} - s_i), size n-1
  VectorXd V;  // shell volume around node i, size n
};

Stencil stencil(const RadialGrid& g) {
  const Eigen::Index n = g.size();
  const int N = g.dims.N;
  Stencil st{VectorXd(n - 1), VectorXd::Zero(n)};
  VectorXd mid(n - 1);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    mid(i) = 0.5 * (g.nodes(i) + g.nodes(i + 1));
    st.a(i) = std::pow(mid(i), N - 1) / (g.nodes(i + 1) - g.nodes(i));
  }
  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    st.V(i) = (std::pow(mid(i), N) - std::pow(mid(i - 1), N)) / N;
  }
  return st;
}

double fpos(double u, double p) { return u > 0 ? std::pow(u, p) : 0.0; }

void require_grid(const RadialGrid& g) {
  if (g.nodes.size() < 3 || g.values.size() != g.nodes.size()) {
    throw std::invalid_argument("radial grid needs at least three nodes and matching values");
  }
}

VectorXd residual_with(const RadialGrid& g, const Stencil& st, const VectorXd& u, double mu) {
  const Eigen::Index n = g.size();
  VectorXd r(n);
  r(0) = u(0);
  r(n - 1) = u(n - 1);
  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    r(i) = -st.a(i) * (u(i + 1) - u(i)) + st.a(i - 1) * (u(i) - u(i - 1)) - st.V(i) * mu * fpos(u(i), g.dims.p);
  }
  return r;
}

double scale_with(const RadialGrid& g, const Stencil& st, const VectorXd& u, double mu) {
  double s = 0;
  for (Eigen::Index i = 1; i + 1 < g.size(); ++i) s = std::max(s, std::abs(st.V(i) * mu * fpos(u(i), g.dims.p)));
  return s;
}

double relative_residual(const VectorXd& r, double scale) {
  const double rn = r.lpNorm<Eigen::Infinity>();
  if (rn == 0) return 0;
  return scale > 0 ? rn / scale : std::numeric_limits<double>::infinity();
}

ConcentrationMetrics metrics_of(const RadialGrid& g, double epsilon, double mu) {
  ConcentrationMetrics m;
  Eigen::Index k = 0;
  m.umax = g.values.maxCoeff(&k);
  m.rpeak = g.nodes(k);
  const double amp = g.dims.alphaN * std::pow(mu, -1 / (g.dims.p - 1));
  m.delta_est = std::pow(amp / m.umax, 2 / (g.dims.N - 2.0));
  m.d_est = m.delta_est / std::sqrt(epsilon);
  m.energy = radial_energy(g, mu);
  return m;
}

// Profile with concentration scale delta_from, moved to delta_to on the mesh of `target`:
// u(s) -> lambda^{(N-2)/2} u(lambda s), lambda = delta_from / delta_to, linear in log s.
RadialGrid rescale_onto(const RadialGrid& src, double delta_from, double delta_to, RadialGrid target) {
  const double lambda = delta_from / delta_to;
  const double amp = std::pow(lambda, target.dims.half_gap());
  const Eigen::Index n = src.size();
  const VectorXd logs = src.nodes.array().log().matrix();
  for (Eigen::Index i = 0; i < target.size(); ++i) {
    const double t = std::log(lambda * target.nodes(i));
    double v = 0;
    if (t > logs(0) && t < logs(n - 1)) {
      const Eigen::Index j = std::upper_bound(logs.data(), logs.data() + n, t) - logs.data() - 1;
      const double w = (t - logs(j)) / (logs(j + 1) - logs(j));
      v = (1 - w) * src.values(j) + w * src.values(j + 1);
    }
    target.values(i) = amp * v;
  }
  target.values(0) = 0;
  target.values(target.size() - 1) = 0;
  return target;
}

}  // namespace

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged:
      return "converged";
    case SolveStatus::trivial_branch:
      return "trivial branch";
    case SolveStatus::diverged:
      return "diverged";
  }
  return "unknown";
}

RadialGrid make_log_grid(const Dims& dims, double rho0, double R, int nodes) {
  if (!(rho0 > 0 && rho0 < R)) throw DomainError("degenerate annulus: need 0 < rho0 < R");
  RadialGrid g;
  g.dims = dims;
  g.nodes = geometric_grid(rho0, R, nodes);
  g.values = VectorXd::Zero(nodes);
  return g;
}

VectorXd discrete_residual(const RadialGrid& g, double mu) {
  require_grid(g);
  return residual_with(g, stencil(g), g.values, mu);
}

double residual_scale(const RadialGrid& g, double mu) {
  require_grid(g);
  return scale_with(g, stencil(g), g.values, mu);
}

double ansatz_scale(const Dims& dims, double R, double r, double epsilon, double mu) {
  const Ball<double> ball(VectorXd::Zero(dims.N), R);
  const auto model = ReducedEnergyModel::make(dims, VectorXd::Constant(1, single_peak_weight(dims, mu)),
                                              VectorXd::Constant(1, kernel_robin(ball, VectorXd::Zero(dims.N))),
                                              VectorXd::Constant(1, r));
  const auto cp = critical_point(model);
  return cp.point.d(0) * std::sqrt(epsilon);
}

RadialGrid bubble_ansatz(const Dims& dims, double R, double r, double epsilon, double delta, double mu, int nodes) {
  auto g = make_log_grid(dims, r * epsilon, R, nodes);
  const auto proj = project_bubble_radial(dims, r * epsilon, R, delta);
  const double amp = std::pow(mu, -1 / (dims.p - 1));
  for (Eigen::Index i = 0; i < g.size(); ++i) g.values(i) = amp * proj.PU(g.nodes(i));
  return g;
}

RadialSolveResult solve_radial(const Dims& dims, double R, double r, double epsilon, const RadialGrid& initial,
                               const RadialSolverOptions& opt) {
  require_grid(initial);
  if (!(epsilon > 0)) throw std::invalid_argument("epsilon must be positive");
  if (std::abs(initial.nodes(0) - r * epsilon) > 1e-12 * r * epsilon ||
      std::abs(initial.nodes(initial.size() - 1) - R) > 1e-12 * R) {
    throw std::invalid_argument("initial grid does not span the annulus");
  }
  (void)dims;
  RadialSolveResult res;
  res.epsilon = epsilon;
  res.grid = initial;
  const Eigen::Index n = initial.size();
  const Stencil st = stencil(initial);
  const double p = initial.dims.p;
  VectorXd u = initial.values;
  u(0) = 0;
  u(n - 1) = 0;

  VectorXd r_vec = residual_with(initial, st, u, opt.mu);
  double rel = relative_residual(r_vec, scale_with(initial, st, u, opt.mu));
  res.residual_history.push_back(rel);

  Eigen::SparseMatrix<double> J(n, n);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(3 * n);
  while (rel >= opt.tol && res.iterations < opt.max_iter) {
    trip.clear();
    trip.emplace_back(0, 0, 1.0);
    trip.emplace_back(n - 1, n - 1, 1.0);
    for (Eigen::Index i = 1; i + 1 < n; ++i) {
      const double df = u(i) > 0 ? p * std::pow(u(i), p - 1) : 0.0;
      trip.emplace_back(i, i - 1, -st.a(i - 1));
      trip.emplace_back(i, i + 1, -st.a(i));
      trip.emplace_back(i, i, st.a(i) + st.a(i - 1) - st.V(i) * opt.mu * df);
    }
    J.setFromTriplets(trip.begin(), trip.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(J);
    if (lu.info() != Eigen::Success) break;
    const VectorXd step = lu.solve(-r_vec);
    if (lu.info() != Eigen::Success || !step.allFinite()) break;

    // Backtracking on the Euclidean residual norm.
    const double f0 = r_vec.norm();
    double t = 1.0;
    VectorXd trial;
    VectorXd r_trial;
    for (int ls = 0; ls < 30; ++ls) {
      trial = u + t * step;
      r_trial = residual_with(initial, st, trial, opt.mu);
      if (r_trial.norm() <= (1 - 1e-4 * t) * f0) break;
      t *= 0.5;
    }
    u = trial;
    r_vec = r_trial;
    rel = relative_residual(r_vec, scale_with(initial, st, u, opt.mu));
    res.residual_history.push_back(rel);
    ++res.iterations;
  }
  res.grid.values = u;
  const double initial_peak = initial.values.cwiseAbs().maxCoeff();
  const bool vanished = u.cwiseAbs().maxCoeff() <= 1e-8 * std::max(1.0, initial_peak);
  if (rel < opt.tol) {
    res.status = vanished ? SolveStatus::trivial_branch : SolveStatus::converged;
  } else {
    res.status = SolveStatus::diverged;
  }
  if (res.status == SolveStatus::converged) res.metrics = metrics_of(res.grid, epsilon, opt.mu);
  return res;
}

RadialSolveResult solve_radial_ansatz(const Dims& dims, double R, double r, double epsilon,
                                      const RadialSolverOptions& opt) {
  const double delta = ansatz_scale(dims, R, r, epsilon, opt.mu);
  return solve_radial(dims, R, r, epsilon, bubble_ansatz(dims, R, r, epsilon, delta, opt.mu, opt.nodes), opt);
}

double radial_energy(const RadialGrid& g, double mu) {
  require_grid(g);
  const int N = g.dims.N;
  const double p = g.dims.p;
  const Stencil st = stencil(g);
  double grad = 0;
  double pot = 0;
  for (Eigen::Index i = 0; i + 1 < g.size(); ++i) {
    const double du = g.values(i + 1) - g.values(i);
    grad += st.a(i) * du * du;
    const double h = g.nodes(i + 1) - g.nodes(i);
    const double fl = std::pow(g.nodes(i), N - 1) * fpos(g.values(i), p + 1);
    const double fr = std::pow(g.nodes(i + 1), N - 1) * fpos(g.values(i + 1), p + 1);
    pot += 0.5 * h * (fl + fr);
  }
  return g.dims.omegaNm1 * (0.5 * grad - mu / (p + 1) * pot);
}

RateSweepReport rate_sweep(const Dims& dims, double R, double r, const VectorXd& epsilon_grid,
                           const RadialSolverOptions& opt) {
  if (epsilon_grid.size() < 2) throw std::invalid_argument("rate sweep needs two or more epsilon values");
  VectorXd eps = epsilon_grid;
  std::sort(eps.data(), eps.data() + eps.size(), std::greater<>());
  RateSweepReport rep;
  rep.epsilon_grid = eps;
  rep.d_tilde = ansatz_scale(dims, R, r, 1.0, opt.mu);

  for (Eigen::Index k = 0; k < eps.size(); ++k) {
    RadialSolveResult res;
    bool done = false;
    if (k > 0) {
      const auto& prev = rep.solves.back();
      const double delta_prev = prev.metrics.delta_est;
      const double delta_next = delta_prev * std::sqrt(eps(k) / eps(k - 1));
      const auto seed = rescale_onto(prev.grid, delta_prev, delta_next,
                                     make_log_grid(dims, r * eps(k), R, opt.nodes));
      res = solve_radial(dims, R, r, eps(k), seed, opt);
      done = res.status == SolveStatus::converged;
    }
    if (!done) res = solve_radial_ansatz(dims, R, r, eps(k), opt);
    rep.solves.push_back(std::move(res));
    if (rep.solves.back().status != SolveStatus::converged) break;
  }

  const auto ok = static_cast<Eigen::Index>(rep.solves.size());
  rep.complete = ok == eps.size() && rep.solves.back().status == SolveStatus::converged;
  const Eigen::Index good = rep.complete ? ok : ok - 1;
  rep.delta_est.resize(good);
  rep.d_est.resize(good);
  for (Eigen::Index k = 0; k < good; ++k) {
    rep.delta_est(k) = rep.solves[k].metrics.delta_est;
    rep.d_est(k) = rep.solves[k].metrics.d_est;
  }
  if (good >= 2) {
    const auto fit = fit_loglog(eps.head(good), rep.delta_est);
    rep.slope = fit.slope;
    rep.r2 = fit.r2;
    rep.d_limit = rep.d_est(good - 1);
    const VectorXd tail = rep.d_est.tail(std::min<Eigen::Index>(3, good));
    rep.d_spread = (tail.maxCoeff() - tail.minCoeff()) / tail.mean();
  }
  return rep;
}

GroupComposition compose_group_solution(const CouplingSpec& spec, const CVector& cv, const RadialGrid& w) {
  require_grid(w);
  const auto [first, last] = spec.group_range(cv.group);
  const int k = last - first;
  if (cv.c.size() != k) throw std::invalid_argument("amplitude vector does not match the group size");
  if (w.dims.N != spec.N) throw std::invalid_argument("profile dimension differs from the coupling spec");
  const double p = w.dims.p;
  const Stencil st = stencil(w);
  const Eigen::Index n = w.size();
  const MatrixXd B = spec.block(cv.group);

  GroupComposition out;
  const VectorXd rw = residual_with(w, st, w.values, 1.0);
  out.scalar_residual = rw.segment(1, n - 2).lpNorm<Eigen::Infinity>();
  const double wscale = scale_with(w, st, w.values, 1.0);
  out.residual_sup.resize(k);
  out.identity_gap.resize(k);
  for (int i = 0; i < k; ++i) {
    RadialGrid ui = w;
    ui.values = cv.c(i) * w.values;
    out.components.push_back(ui);
  }
  for (int i = 0; i < k; ++i) {
    const VectorXd& u = out.components[i].values;
    double sup = 0;
    double gap = 0;
    for (Eigen::Index m = 1; m + 1 < n; ++m) {
      double source = 0;
      for (int j = 0; j < k; ++j) {
        const double uj = std::abs(out.components[j].values(m));
        const double ui = std::abs(u(m));
        source += j == i ? B(i, i) * fpos(u(m), p) : B(i, j) * std::pow(uj, (p + 1) / 2) * std::pow(ui, (p - 1) / 2);
      }
      const double res = -st.a(m) * (u(m + 1) - u(m)) + st.a(m - 1) * (u(m) - u(m - 1)) - st.V(m) * source;
      sup = std::max(sup, std::abs(res));
      gap = std::max(gap, std::abs(res - cv.c(i) * rw(m)));
    }
    out.residual_sup(i) = sup;
    out.identity_gap(i) = wscale > 0 ? gap / wscale : gap;
  }
  return out;
}

double energy_of_solution(const std::vector<RadialGrid>& grids, const CouplingSpec& spec) {
  if (grids.empty() || static_cast<int>(grids.size()) != spec.components()) {
    throw std::invalid_argument("one profile per component is required");
  }
  const auto& g0 = grids.front();
  require_grid(g0);
  for (const auto& g : grids) {
    require_grid(g);
    if (g.size() != g0.size() || (g.nodes - g0.nodes).cwiseAbs().maxCoeff() > 0) {
      throw std::invalid_argument("profiles must share one mesh");
    }
  }
  const int N = g0.dims.N;
  const double p = g0.dims.p;
  const Stencil st = stencil(g0);
  const auto m = grids.size();
  double grad = 0;
  double pot = 0;
  const auto density = [&](Eigen::Index node) {
    double v = 0;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        const double ui = std::abs(grids[i].values(node));
        const double uj = std::abs(grids[j].values(node));
        v += i == j ? spec.beta(i, i) * fpos(grids[i].values(node), p + 1)
                    : spec.beta(i, j) * std::pow(ui, (p + 1) / 2) * std::pow(uj, (p + 1) / 2);
      }
    }
    return std::pow(g0.nodes(node), N - 1) * v;
  };
  for (Eigen::Index q = 0; q + 1 < g0.size(); ++q) {
    for (const auto& g : grids) {
      const double du = g.values(q + 1) - g.values(q);
      grad += st.a(q) * du * du;
    }
    pot += 0.5 * (g0.nodes(q + 1) - g0.nodes(q)) * (density(q) + density(q + 1));
  }
  return g0.dims.omegaNm1 * (0.5 * grad - pot / (p + 1));
}

}  // namespace coron
