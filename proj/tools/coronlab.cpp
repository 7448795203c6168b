#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "coron/config.hpp"
#include "coron/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"coronlab: reduction lab for coupled critical systems in perforated domains"};
  app.require_subcommand(1);

  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  app.add_option("--out", out_dir, "output directory (overrides output.dir)");
  app.add_option("--seed", seed, "random seed (overrides the config seed)");
  app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);

  std::string config_path;
  auto* run = app.add_subcommand("run", "execute the tasks of a config");
  run->add_option("config", config_path, "experiment config (JSON)")->required();
  run->fallthrough();
  auto* validate = app.add_subcommand("validate", "check a config and print diagnostics");
  validate->add_option("config", config_path, "experiment config (JSON)")->required();
  validate->fallthrough();

  CLI11_PARSE(app, argc, argv);

  coron::ExperimentConfig cfg;
  try {
    cfg = coron::load_config(config_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  if (validate->parsed()) {
    const auto diags = coron::validate_config(cfg);
    for (const auto& d : diags) std::cout << coron::to_string(d) << '\n';
    if (diags.empty()) std::cout << "ok\n";
    return coron::has_errors(diags) ? 1 : 0;
  }

  coron::RunOptions opt;
  opt.out_dir = out_dir;
  opt.seed = seed;
  opt.threads = threads;
  coron::RunResult res;
  try {
    res = coron::run_experiment(cfg, opt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  for (const auto& d : res.summary["diagnostics"]) {
    std::cerr << d["severity"].get<std::string>() << ": " << d["field"].get<std::string>() << ": "
              << d["message"].get<std::string>() << '\n';
  }
  for (const auto& [name, entry] : res.summary["tasks"].items()) {
    std::cout << name << ": " << entry["verdict"].get<std::string>();
    if (entry.contains("error")) std::cout << " (" << entry["error"].get<std::string>() << ")";
    std::cout << '\n';
  }
  for (const auto& f : res.files) std::cout << "wrote " << f << '\n';
  return res.exit_code;
}
