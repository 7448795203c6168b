#include "coron/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "coron/coupling.hpp"
#include "coron/green.hpp"

namespace coron {
namespace {

using nlohmann::json;

VectorXd to_vector(const json& j, const std::string& field) {
  if (!j.is_array()) throw ConfigError(field + ": expected an array of numbers");
  VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError(field + "[" + std::to_string(i) + "]: expected a number");
    v(i) = j[i].get<double>();
  }
  return v;
}

MatrixXd to_matrix(const json& j, const std::string& field) {
  if (!j.is_array()) throw ConfigError(field + ": expected an array of rows");
  const std::size_t rows = j.size();
  const std::size_t cols = rows ? j[0].size() : 0;
  MatrixXd m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    const VectorXd row = to_vector(j[i], field + "[" + std::to_string(i) + "]");
    if (static_cast<std::size_t>(row.size()) != cols) throw ConfigError(field + ": rows differ in length");
    m.row(i) = row.transpose();
  }
  return m;
}

double number(const json& j, const char* key, const std::string& field, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) throw ConfigError(field + "." + key + ": expected a number");
  return j[key].get<double>();
}

}  // namespace

std::string to_string(const Diagnostic& d) {
  return std::string(d.severity == Severity::error ? "error" : "warning") + ": " + d.field + ": " + d.message;
}

const std::vector<std::string>& known_tasks() {
  static const std::vector<std::string> tasks{"c-vector",       "spectrum",       "reduced-energy",
                                              "critical-point", "scaling-checks", "radial-sweep"};
  return tasks;
}

ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  ExperimentConfig cfg;
  if (!j.contains("schema") || !j["schema"].is_string()) throw ConfigError("schema: missing version string");
  if (j["schema"].get<std::string>() != kSchemaVersion) {
    throw ConfigError("schema: unsupported version '" + j["schema"].get<std::string>() + "', expected " +
                      kSchemaVersion);
  }
  if (!j.contains("dims") || !j["dims"].is_number_integer()) throw ConfigError("dims: expected an integer");
  cfg.dims = j["dims"].get<int>();

  if (!j.contains("coupling") || !j["coupling"].is_object()) throw ConfigError("coupling: missing section");
  const auto& c = j["coupling"];
  if (!c.contains("mu")) throw ConfigError("coupling.mu: missing");
  cfg.mu = to_vector(c["mu"], "coupling.mu");
  cfg.beta = c.contains("beta") ? to_matrix(c["beta"], "coupling.beta") : MatrixXd(cfg.mu.asDiagonal());
  if (c.contains("decomposition")) {
    if (!c["decomposition"].is_array()) throw ConfigError("coupling.decomposition: expected an array of integers");
    for (const auto& x : c["decomposition"]) {
      if (!x.is_number_integer()) throw ConfigError("coupling.decomposition: expected integers");
      cfg.decomposition.push_back(x.get<int>());
    }
  }

  if (j.contains("domain")) {
    const auto& d = j["domain"];
    if (!d.is_object()) throw ConfigError("domain: expected an object");
    if (d.contains("ball")) {
      const auto& b = d["ball"];
      if (b.contains("center")) cfg.ball_center = to_vector(b["center"], "domain.ball.center");
      cfg.ball_radius = number(b, "radius", "domain.ball", 1.0);
    }
    if (d.contains("holes")) {
      if (!d["holes"].is_array()) throw ConfigError("domain.holes: expected an array");
      for (std::size_t i = 0; i < d["holes"].size(); ++i) {
        const auto& h = d["holes"][i];
        const std::string f = "domain.holes[" + std::to_string(i) + "]";
        if (!h.is_object() || !h.contains("center")) throw ConfigError(f + ": expected {center, r}");
        cfg.holes.push_back({to_vector(h["center"], f + ".center"), number(h, "r", f, 1.0)});
      }
    }
    cfg.epsilon = number(d, "epsilon", "domain", cfg.epsilon);
  }
  if (cfg.ball_center.size() == 0) cfg.ball_center = VectorXd::Zero(std::max(cfg.dims, 0));

  if (j.contains("reduction")) {
    const auto& r = j["reduction"];
    cfg.eta = number(r, "eta", "reduction", cfg.eta);
    if (r.contains("epsilon_grid")) cfg.epsilon_grid = to_vector(r["epsilon_grid"], "reduction.epsilon_grid");
  }
  if (j.contains("tasks")) {
    if (!j["tasks"].is_array()) throw ConfigError("tasks: expected an array of task names");
    for (const auto& t : j["tasks"]) {
      if (!t.is_string()) throw ConfigError("tasks: expected strings");
      cfg.tasks.push_back(t.get<std::string>());
    }
  }
  if (j.contains("output")) {
    const auto& o = j["output"];
    if (o.contains("dir")) cfg.output_dir = o["dir"].get<std::string>();
    if (o.contains("formats")) cfg.formats = o["formats"].get<std::vector<std::string>>();
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw ConfigError("seed: expected a nonnegative integer");
    cfg.seed = j["seed"].get<std::uint64_t>();
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open file");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": malformed JSON: " + e.what());
  }
  try {
    return parse_config(j);
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::vector<Diagnostic> validate_config(const ExperimentConfig& cfg) {
  std::vector<Diagnostic> out;
  const auto error = [&](std::string f, std::string m) { out.push_back({Severity::error, std::move(f), std::move(m)}); };
  const auto warn = [&](std::string f, std::string m) { out.push_back({Severity::warning, std::move(f), std::move(m)}); };
  const int N = cfg.dims;
  const int m = static_cast<int>(cfg.mu.size());
  if (N != 3 && N != 4) error("dims", "dimension must be 3 or 4");

  if (m == 0) error("coupling.mu", "at least one component is required");
  for (int i = 0; i < m; ++i) {
    if (!(cfg.mu(i) > 0)) error("coupling.mu[" + std::to_string(i) + "]", "must be positive");
  }
  bool beta_ok = cfg.beta.rows() == m && cfg.beta.cols() == m;
  if (!beta_ok) {
    error("coupling.beta", "must be " + std::to_string(m) + "x" + std::to_string(m));
  } else {
    for (int i = 0; i < m; ++i) {
      if (cfg.beta(i, i) != cfg.mu(i)) {
        error("coupling.beta[" + std::to_string(i) + "][" + std::to_string(i) + "]", "diagonal must equal mu");
      }
      for (int k = i + 1; k < m; ++k) {
        if (std::abs(cfg.beta(i, k) - cfg.beta(k, i)) > 1e-12 * std::max(1.0, std::abs(cfg.beta(i, k)))) {
          error("coupling.beta[" + std::to_string(i) + "][" + std::to_string(k) + "]", "matrix is not symmetric");
          beta_ok = false;
        }
      }
    }
  }
  const auto spec = CouplingSpec::make(N, cfg.mu, cfg.beta, cfg.decomposition);
  bool decomposition_ok = true;
  for (const auto& v : spec.violations()) {
    if (v.rfind("decomposition", 0) == 0) {
      error("coupling.decomposition", v);
      decomposition_ok = false;
    }
  }
  if (beta_ok && decomposition_ok && m > 0 && (cfg.mu.array() > 0).all()) {
    for (int h = 0; h < spec.groups(); ++h) {
      const auto [first, last] = spec.group_range(h);
      if (last - first != 2) continue;
      if (!admissible_beta_range(cfg.mu(first), cfg.mu(first + 1), cfg.beta(first, first + 1))) {
        warn("coupling.beta[" + std::to_string(first) + "][" + std::to_string(first + 1) + "]",
             "outside the range where nondegeneracy of the group is known");
      }
    }
  }

  if (cfg.ball_center.size() != N) error("domain.ball.center", "must have " + std::to_string(N) + " coordinates");
  if (!(cfg.ball_radius > 0)) error("domain.ball.radius", "must be positive");
  if (!(cfg.epsilon > 0)) error("domain.epsilon", "must be positive");
  if (cfg.ball_center.size() == N && cfg.ball_radius > 0 && cfg.epsilon > 0) {
    PerforatedDomain<double> dom{Ball<double>(cfg.ball_center, cfg.ball_radius), {}, cfg.epsilon};
    for (const auto& h : cfg.holes) dom.holes.push_back({h.center, h.r});
    for (const auto& v : dom.violations()) {
      const auto colon = v.find(':');
      const std::string idx = v.substr(5, colon - 5);
      error("domain.holes[" + idx + "]", v.substr(colon + 2));
    }
  }

  if (!(cfg.eta > 0 && cfg.eta < 1)) error("reduction.eta", "must lie in (0, 1)");
  for (Eigen::Index i = 0; i < cfg.epsilon_grid.size(); ++i) {
    if (!(cfg.epsilon_grid(i) > 0 && cfg.epsilon_grid(i) < 1)) {
      error("reduction.epsilon_grid[" + std::to_string(i) + "]", "must lie in (0, 1)");
    }
  }

  const auto wants = [&](const std::string& t) { return std::find(cfg.tasks.begin(), cfg.tasks.end(), t) != cfg.tasks.end(); };
  for (const auto& t : cfg.tasks) {
    if (std::find(known_tasks().begin(), known_tasks().end(), t) == known_tasks().end()) {
      error("tasks", "unknown task '" + t + "'");
    }
  }
  if (wants("spectrum") && N == 3) error("tasks", "spectrum is only available for dims = 4");
  if ((wants("reduced-energy") || wants("critical-point")) && decomposition_ok &&
      static_cast<int>(cfg.holes.size()) != spec.groups()) {
    error("domain.holes", "reduced energy needs one hole per group (" + std::to_string(spec.groups()) + ")");
  }
  if (wants("radial-sweep")) {
    if (decomposition_ok && spec.groups() != 1) error("tasks", "radial-sweep needs a single group");
    if (cfg.holes.size() != 1 ||
        (cfg.holes.size() == 1 && cfg.holes[0].center.size() == cfg.ball_center.size() &&
         (cfg.holes[0].center - cfg.ball_center).norm() > 1e-12 * cfg.ball_radius)) {
      error("domain.holes", "radial-sweep needs a single hole at the ball center");
    }
    if (cfg.epsilon_grid.size() < 2) error("reduction.epsilon_grid", "radial-sweep needs two or more values");
  }
  for (const auto& f : cfg.formats) {
    if (f != "json" && f != "csv") error("output.formats", "unknown format '" + f + "'");
  }
  return out;
}

bool has_errors(const std::vector<Diagnostic>& diags) {
  return std::any_of(diags.begin(), diags.end(), [](const Diagnostic& d) { return d.severity == Severity::error; });
}

}  // namespace coron
