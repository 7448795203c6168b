#include "coron/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "coron/asymptotics.hpp"
#include "coron/coupling.hpp"
#include "coron/fit.hpp"
#include "coron/green.hpp"
#include "coron/parallel.hpp"
#include "coron/radial_solver.hpp"
#include "coron/reduced_energy.hpp"

namespace coron {
namespace {

using nlohmann::json;

json to_json(const VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json to_json(const MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(to_json(VectorXd(m.row(i).transpose())));
  return rows;
}

json traced(const char* module, const char* operation, json values) {
  return {{"module", module}, {"operation", operation}, {"values", std::move(values)}};
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

struct CsvFile {
  std::string name;
  std::string content;
};

// Output of one dependency chain: per-task report objects plus tables to write.
struct ChainOutput {
  std::vector<std::pair<std::string, json>> tasks;
  std::vector<CsvFile> tables;
};

class TaskTimer {
 public:
  TaskTimer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

// Runs body and wraps its result with status and timing; exceptions become an error entry.
json run_task(const std::function<json()>& body) {
  TaskTimer timer;
  json entry;
  try {
    entry = body();
    entry["status"] = "ok";
  } catch (const std::exception& e) {
    entry = {{"status", "error"}, {"verdict", "error"}, {"error", e.what()}};
  }
  entry["timing_s"] = timer.seconds();
  return entry;
}

bool wants(const ExperimentConfig& cfg, const std::string& t) {
  return std::find(cfg.tasks.begin(), cfg.tasks.end(), t) != cfg.tasks.end();
}

CouplingSpec spec_of(const ExperimentConfig& cfg) {
  return CouplingSpec::make(cfg.dims, cfg.mu, cfg.beta, cfg.decomposition);
}

std::vector<CVector> amplitudes(const CouplingSpec& spec) {
  std::vector<CVector> cs;
  for (int h = 0; h < spec.groups(); ++h) cs.push_back(solve_c_vector(spec, h, CSolvePolicy::allow_boundary));
  return cs;
}

ReducedEnergyModel model_of(const ExperimentConfig& cfg, const std::vector<CVector>& cs) {
  const auto dims = Dims::make(cfg.dims);
  const Ball<double> ball(cfg.ball_center, cfg.ball_radius);
  const auto k = static_cast<Eigen::Index>(cs.size());
  VectorXd weights(k), robin(k), r(k);
  for (Eigen::Index h = 0; h < k; ++h) {
    weights(h) = cs[h].c.squaredNorm();
    robin(h) = kernel_robin(ball, cfg.holes[h].center);
    r(h) = cfg.holes[h].r;
  }
  return ReducedEnergyModel::make(dims, weights, robin, r);
}

ChainOutput coupling_chain(const ExperimentConfig& cfg, std::uint64_t seed) {
  ChainOutput out;
  const bool need_c = wants(cfg, "c-vector") || wants(cfg, "spectrum") || wants(cfg, "reduced-energy") ||
                      wants(cfg, "critical-point");
  if (!need_c) return out;
  std::vector<CVector> cs;
  bool c_ok = false;
  const json cj = run_task([&] {
    const auto spec = spec_of(cfg);
    cs = amplitudes(spec);
    c_ok = true;
    json groups = json::array();
    bool boundary = false;
    for (const auto& c : cs) {
      boundary = boundary || c.on_boundary;
      groups.push_back(traced("coupling_spectrum", "solve_c_vector",
                              {{"group", c.group},
                               {"c", to_json(c.c)},
                               {"c_squared", to_json(VectorXd(c.c.array().square()))},
                               {"residual", c.residual},
                               {"boundary", c.on_boundary}}));
    }
    return json{{"inputs", {{"mu", to_json(cfg.mu)}, {"beta", to_json(cfg.beta)}}},
                {"outputs", groups},
                {"verdict", boundary ? "boundary" : "pass"}};
  });
  if (wants(cfg, "c-vector")) out.tasks.emplace_back("c-vector", cj);

  const auto dependent_error = [](const char* what) {
    return json{{"status", "error"}, {"verdict", "error"}, {"error", std::string("prerequisite failed: ") + what},
                {"timing_s", 0.0}};
  };

  if (wants(cfg, "spectrum")) {
    if (!c_ok) {
      out.tasks.emplace_back("spectrum", dependent_error("c-vector"));
    } else {
      out.tasks.emplace_back("spectrum", run_task([&] {
        const auto spec = spec_of(cfg);
        json groups = json::array();
        std::string verdict = "pass";
        for (const auto& c : cs) {
          const auto rep = build_spectrum(spec, c);
          json v{{"group", c.group},
                 {"lambdas", to_json(rep.lambdas)},
                 {"thetas", to_json(rep.thetas)},
                 {"principal_lambda", rep.principal_lambda},
                 {"principal_eigvec", to_json(rep.principal_eigvec)},
                 {"verdict", to_string(rep.verdict)},
                 {"reason", rep.reason},
                 {"det_C", rep.det_C},
                 {"det_beta", rep.det_beta},
                 {"prod_c2", rep.prod_c2}};
          if (rep.m2_closed_form) v["closed_form"] = {rep.m2_closed_form->first, rep.m2_closed_form->second};
          groups.push_back(traced("coupling_spectrum", "build_spectrum", v));
          if (rep.verdict != Verdict::nondegenerate && verdict == "pass") verdict = rep.reason;
        }
        return json{{"outputs", groups}, {"verdict", verdict}};
      }));
    }
  }

  const bool need_model = wants(cfg, "reduced-energy") || wants(cfg, "critical-point");
  if (!need_model) return out;
  if (!c_ok) {
    if (wants(cfg, "reduced-energy")) out.tasks.emplace_back("reduced-energy", dependent_error("c-vector"));
    if (wants(cfg, "critical-point")) out.tasks.emplace_back("critical-point", dependent_error("c-vector"));
    return out;
  }
  std::optional<ReducedEnergyModel> model;
  const json rj = run_task([&] {
    model = model_of(cfg, cs);
    const auto& m = *model;
    VectorXd tau = VectorXd::Zero(cfg.dims);
    tau(0) = 0.5;
    const auto mc = gamma_monte_carlo(m.dims, tau, 200000, seed);
    return json{{"inputs", {{"weights", to_json(m.weights)}, {"robin", to_json(m.robin)}, {"hole_r", to_json(m.hole_r)}}},
                {"outputs",
                 {traced("reduced_energy", "constant_b1", {{"b1", m.b1}}),
                  traced("reduced_energy", "constant_b2", {{"b2", m.b2}}),
                  traced("reduced_energy", "gamma_kernel", {{"gamma_0", gamma_radial(m.dims, 0.0).value},
                                                            {"tau", to_json(tau)},
                                                            {"gamma_tau", gamma_kernel(m.dims, tau)}}),
                  traced("reduced_energy", "gamma_monte_carlo",
                         {{"tau", to_json(tau)}, {"estimate", mc.value}, {"std_error", mc.std_error}, {"seed", seed}})}},
                {"verdict", "pass"}};
  });
  if (wants(cfg, "reduced-energy")) out.tasks.emplace_back("reduced-energy", rj);

  if (wants(cfg, "critical-point")) {
    if (!model) {
      out.tasks.emplace_back("critical-point", dependent_error("reduced-energy"));
    } else {
      out.tasks.emplace_back("critical-point", run_task([&] {
        const auto& m = *model;
        const auto cp = critical_point(m, cfg.eta);
        ReducedPoint pt = cp.point;
        pt.eta = std::min({pt.eta, pt.d.minCoeff() / 2, 1 / (2 * pt.d.maxCoeff())});
        const double psi = psi_eval(m, pt);
        const bool stationary = cp.grad_norm <= 1e-10 * std::max(1.0, std::abs(psi));
        const bool ok = stationary && cp.nondegenerate_saddle && cp.in_box;
        return json{{"inputs", {{"eta", cfg.eta}, {"epsilon", cfg.epsilon}}},
                    {"outputs",
                     {traced("reduced_energy", "critical_point",
                             {{"d_tilde", to_json(cp.point.d)},
                              {"grad_norm", cp.grad_norm},
                              {"mixed_block_max", cp.mixed_block_max},
                              {"d_block_positive", cp.d_block_positive},
                              {"tau_block_negative", cp.tau_block_negative},
                              {"in_box", cp.in_box},
                              {"hessian", to_json(cp.hessian)}}),
                      traced("reduced_energy", "psi_eval", {{"psi", psi}}),
                      traced("reduced_energy", "energy_expansion",
                             {{"epsilon", cfg.epsilon}, {"energy", energy_expansion(m, cfg.epsilon)}})}},
                    {"verdict", ok ? "pass" : (cp.in_box ? "fail" : "fail: d~ outside X_eta")}};
      }));
    }
  }
  return out;
}

std::string table(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
    os << '\n';
  }
  return os.str();
}

ChainOutput scaling_chain(const ExperimentConfig& cfg, unsigned threads) {
  ChainOutput out;
  if (!wants(cfg, "scaling-checks")) return out;
  std::vector<CsvFile> tables;
  const json entry = run_task([&] {
    const auto dims = Dims::make(cfg.dims);
    const VectorXd grid = default_delta_grid();
    const int N = cfg.dims;
    struct Check {
      std::string name;
      std::function<std::pair<json, CsvFile>()> run;
    };
    std::vector<Check> checks;
    const auto single = [&](double q) {
      checks.push_back({"single_q" + fmt(q), [=, &dims, &grid] {
                          const auto f = scaling_law_single(q, dims, grid);
                          std::vector<std::vector<double>> rows;
                          for (Eigen::Index i = 0; i < grid.size(); ++i) rows.push_back({grid(i), f.values(i)});
                          return std::make_pair(
                              traced("asymptotics_lab", "scaling_law_single",
                                     {{"q", q}, {"exponent_measured", f.exponent_measured},
                                      {"exponent_predicted", f.exponent_predicted}, {"r2", f.r2},
                                      {"log_case", f.log_case}, {"pass", f.pass()}}),
                              CsvFile{"scaling_single_q" + fmt(q) + ".csv", table({"delta", "value"}, rows)});
                        }});
    };
    const auto weighted = [&](double q, double nu1, double nu2) {
      const std::string tag = "weighted_q" + fmt(q) + "_nu" + fmt(nu1) + "_" + fmt(nu2);
      checks.push_back({tag, [=, &dims, &grid] {
                          const auto f = scaling_law_weighted(q, nu1, nu2, dims, grid);
                          std::vector<std::vector<double>> rows;
                          for (Eigen::Index i = 0; i < grid.size(); ++i) rows.push_back({grid(i), f.values(i)});
                          return std::make_pair(
                              traced("asymptotics_lab", "scaling_law_weighted",
                                     {{"q", q}, {"nu1", nu1}, {"nu2", nu2},
                                      {"exponent_measured", f.exponent_measured},
                                      {"exponent_predicted", f.exponent_predicted}, {"r2", f.r2},
                                      {"log_case", f.log_case}, {"pass", f.pass()}}),
                              CsvFile{"scaling_" + tag + ".csv", table({"delta", "value"}, rows)});
                        }});
    };
    const double crit = double(N) / (N - 2);
    if (N == 4) {
      for (double q : {1.0, 2.0, 3.0, 4.0}) single(q);
      weighted(3, 0, 2);
      weighted(3, 0, 4);
    } else {
      for (double q : {1.0, 3.0, 4.0, 6.0}) single(q);
      weighted(5, 0, 1);
      weighted(1, 0, 3);
    }
    checks.push_back({"pair", [=, &dims, &grid] {
                        const auto rep = scaling_law_pair(crit, crit, dims, grid, 0.5);
                        std::vector<std::vector<double>> rows;
                        for (Eigen::Index i = 0; i < grid.size(); ++i) {
                          rows.push_back({grid(i), rep.values(i), rep.bounds(i), rep.ratios(i)});
                        }
                        return std::make_pair(
                            traced("asymptotics_lab", "scaling_law_pair",
                                   {{"q1", crit}, {"q2", crit}, {"separation", 0.5},
                                    {"ratio_min", rep.ratios.minCoeff()}, {"ratio_max", rep.ratios.maxCoeff()},
                                    {"ratio_slope", rep.ratio_slope}, {"pass", rep.bounded}}),
                            CsvFile{"scaling_pair.csv", table({"delta", "value", "bound", "ratio"}, rows)});
                      }});
    checks.push_back({"remainder", [=, &dims] {
                        const VectorXd eps = geometric_grid(1e-2, 1e-6, 9);
                        const auto rep = remainder_sweep(dims, 1.0, 1.0, 1.0, eps);
                        std::vector<std::vector<double>> rows;
                        for (const auto& p : rep.points) rows.push_back({p.epsilon, p.delta, p.sup_remainder, p.sup_ratio});
                        const auto proj = project_bubble_radial(dims, 1e-3, 1.0, std::sqrt(1e-3));
                        const auto bounds = projection_bounds(proj);
                        const bool bc = std::abs(bounds.boundary_inner) <= 1e-12 && std::abs(bounds.boundary_outer) <= 1e-12;
                        const bool maxp = bounds.min_pu >= 0 && bounds.max_excess <= 0;
                        return std::make_pair(
                            traced("asymptotics_lab", "remainder_check",
                                   {{"ratio_slope", rep.ratio_slope}, {"boundary_values_exact", bc},
                                    {"max_principle", maxp}, {"pass", rep.bounded && bc && maxp}}),
                            CsvFile{"scaling_remainder.csv",
                                    table({"epsilon", "delta", "sup_remainder", "sup_ratio"}, rows)});
                      }});
    const auto results = parallel_map(checks.size(), [&](std::size_t i) { return checks[i].run(); }, threads);
    json outputs = json::object();
    bool all = true;
    for (std::size_t i = 0; i < checks.size(); ++i) {
      outputs[checks[i].name] = results[i].first;
      all = all && results[i].first["values"]["pass"].get<bool>();
      tables.push_back(results[i].second);
    }
    return json{{"inputs", {{"dims", N}, {"delta_grid", to_json(grid)}}}, {"outputs", outputs},
                {"verdict", all ? "pass" : "fail"}};
  });
  out.tasks.emplace_back("scaling-checks", entry);
  out.tables = std::move(tables);
  return out;
}

ChainOutput sweep_chain(const ExperimentConfig& cfg) {
  ChainOutput out;
  if (!wants(cfg, "radial-sweep")) return out;
  std::vector<CsvFile> tables;
  const json entry = run_task([&] {
    const auto dims = Dims::make(cfg.dims);
    const auto spec = spec_of(cfg);
    const auto cv = solve_c_vector(spec, 0, CSolvePolicy::allow_boundary);
    const bool scalar = cv.c.size() == 1;
    RadialSolverOptions opt;
    opt.mu = scalar ? cfg.mu(0) : 1.0;
    const double R = cfg.ball_radius;
    const double r = cfg.holes.at(0).r;
    const auto rep = rate_sweep(dims, R, r, cfg.epsilon_grid, opt);

    std::vector<std::vector<double>> rows;
    json solves = json::array();
    for (const auto& s : rep.solves) {
      rows.push_back({s.epsilon, s.metrics.delta_est, s.metrics.d_est, s.metrics.umax, s.metrics.rpeak, s.metrics.energy,
                      double(s.iterations), s.residual_history.back()});
      solves.push_back({{"epsilon", s.epsilon}, {"status", to_string(s.status)}, {"iterations", s.iterations},
                        {"residual", s.residual_history.back()}, {"delta_est", s.metrics.delta_est},
                        {"d_est", s.metrics.d_est}, {"energy", s.metrics.energy}});
      std::vector<std::vector<double>> prof;
      for (Eigen::Index i = 0; i < s.grid.size(); ++i) prof.push_back({s.grid.nodes(i), s.grid.values(i)});
      tables.push_back({"profile_" + fmt(s.epsilon) + ".csv", table({"radius", "value"}, prof)});
    }
    tables.push_back({"sweep_group0.csv",
                      table({"epsilon", "delta_est", "d_est", "umax", "rpeak", "energy", "iterations", "residual"}, rows)});

    const bool rate_ok = rep.complete && std::abs(rep.slope - 0.5) <= 0.05 &&
                         std::abs(rep.d_limit / rep.d_tilde - 1) <= 0.2;
    json outputs{traced("radial_solver", "rate_sweep",
                        {{"slope", rep.slope}, {"r2", rep.r2}, {"d_est", rep.d_limit}, {"d_tilde", rep.d_tilde},
                         {"d_spread", rep.d_spread}, {"complete", rep.complete}, {"solves", solves}})};
    bool compose_ok = true;
    if (!scalar && rep.complete) {
      const auto comp = compose_group_solution(spec, cv, rep.solves.back().grid);
      compose_ok = comp.identity_gap.maxCoeff() <= 1e-10;
      std::vector<RadialGrid> grids = comp.components;
      CouplingSpec sub = CouplingSpec::make(cfg.dims, cfg.mu.head(cv.c.size()),
                                            cfg.beta.topLeftCorner(cv.c.size(), cv.c.size()));
      outputs.push_back(traced("radial_solver", "compose_group_solution",
                               {{"c", to_json(cv.c)}, {"residual_sup", to_json(comp.residual_sup)},
                                {"identity_gap", to_json(comp.identity_gap)},
                                {"scalar_residual", comp.scalar_residual}}));
      outputs.push_back(traced("radial_solver", "energy_of_solution", {{"energy", energy_of_solution(grids, sub)}}));
    }
    return json{{"inputs", {{"epsilon_grid", to_json(cfg.epsilon_grid)}, {"R", R}, {"r", r}, {"mu", opt.mu}}},
                {"outputs", outputs},
                {"verdict", rate_ok && compose_ok ? "pass" : (rep.complete ? "fail" : "fail: sweep incomplete")}};
  });
  out.tasks.emplace_back("radial-sweep", entry);
  out.tables = std::move(tables);
  return out;
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg_in, const RunOptions& opt) {
  ExperimentConfig cfg = cfg_in;
  if (opt.out_dir) cfg.output_dir = *opt.out_dir;
  if (opt.seed) cfg.seed = *opt.seed;

  RunResult result;
  json& summary = result.summary;
  summary["schema"] = kSchemaVersion;
  summary["seed"] = cfg.seed;
  summary["tasks"] = json::object();

  const auto diags = validate_config(cfg);
  json dj = json::array();
  for (const auto& d : diags) {
    dj.push_back({{"severity", d.severity == Severity::error ? "error" : "warning"}, {"field", d.field},
                  {"message", d.message}});
  }
  summary["diagnostics"] = dj;
  if (has_errors(diags)) {
    result.exit_code = 1;
    summary["exit_code"] = 1;
    return result;
  }

  const std::vector<std::function<ChainOutput()>> chains{
      [&] { return coupling_chain(cfg, cfg.seed); },
      [&] { return scaling_chain(cfg, opt.threads); },
      [&] { return sweep_chain(cfg); },
  };
  const auto outputs = parallel_map(chains.size(), [&](std::size_t i) { return chains[i](); }, opt.threads);

  bool error = false;
  bool not_pass = false;
  std::vector<CsvFile> tables;
  for (const auto& chain : outputs) {
    for (const auto& [name, entry] : chain.tasks) {
      summary["tasks"][name] = entry;
      if (entry["status"] == "error") error = true;
      if (entry["verdict"] != "pass") not_pass = true;
    }
    tables.insert(tables.end(), chain.tables.begin(), chain.tables.end());
  }
  result.exit_code = error ? 1 : (not_pass ? 2 : 0);
  summary["exit_code"] = result.exit_code;

  if (opt.write_files) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.output_dir);
    const auto has = [&](const char* f) { return std::find(cfg.formats.begin(), cfg.formats.end(), f) != cfg.formats.end(); };
    if (has("json")) {
      const auto path = (fs::path(cfg.output_dir) / "summary.json").string();
      std::ofstream(path) << summary.dump(2) << '\n';
      result.files.push_back(path);
    }
    if (has("csv")) {
      for (const auto& t : tables) {
        const auto path = (fs::path(cfg.output_dir) / t.name).string();
        std::ofstream(path) << t.content;
        result.files.push_back(path);
      }
    }
  }
  return result;
}

}  // namespace coron
