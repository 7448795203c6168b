#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "coron/types.hpp"

namespace coron {

inline constexpr const char* kSchemaVersion = "coronlab/1";

struct HoleConfig {
  VectorXd center;
  double r = 1;
};

/// Parsed experiment description. Fields mirror the JSON layout.
struct ExperimentConfig {
  int dims = 4;
  VectorXd mu;
  MatrixXd beta;
  std::vector<int> decomposition;
  VectorXd ball_center;
  double ball_radius = 1;
  std::vector<HoleConfig> holes;
  double epsilon = 1e-3;
  double eta = 1e-3;
  VectorXd epsilon_grid;
  std::vector<std::string> tasks;
  std::string output_dir = "coronlab-out";
  std::vector<std::string> formats{"json", "csv"};
  std::uint64_t seed = 0;
};

enum class Severity { error, warning };

struct Diagnostic {
  Severity severity;
  std::string field;
  std::string message;
};

std::string to_string(const Diagnostic& d);

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

const std::vector<std::string>& known_tasks();

/// Structural parse. Throws ConfigError on malformed JSON or wrongly typed fields; semantic
/// problems are left to validate_config.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

/// Field-level diagnostics. Errors block a run; warnings (e.g. coupling outside the range
/// where nondegeneracy is known) do not.
std::vector<Diagnostic> validate_config(const ExperimentConfig& cfg);

bool has_errors(const std::vector<Diagnostic>& diags);

}  // namespace coron
