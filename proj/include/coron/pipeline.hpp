#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "coron/config.hpp"

namespace coron {

struct RunOptions {
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  bool write_files = true;
};

struct RunResult {
  int exit_code = 0;  // 0 all verdicts pass, 1 error, 2 some verdict degenerate/inconclusive/failed
  nlohmann::json summary;
  std::vector<std::string> files;
};

/// Validates the config, executes the requested tasks in dependency order and writes
/// summary.json plus CSV tables under the output directory.
RunResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opt = {});

}  // namespace coron
