#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hexch/acceptance.hpp"
#include "hexch/error.hpp"
#include "hexch/experiment.hpp"
#include "hexch/parallel.hpp"
#include "hexch/scenarios.hpp"

namespace {

auto verify(const std::string& suite, bool right_quantiles) -> int {
  auto ids = std::vector<int>{};
  try {
    ids = hexch::suite_criteria(suite);
  } catch (const hexch::ConfigError& e) {
    std::cerr << e.what() << '\n';
    return hexch::exit_config_error;
  }
  auto options = hexch::SuiteOptions{};
  if (right_quantiles) options.convention = hexch::QuantileConvention::right;
  auto summary = nlohmann::json::array();
  auto all = true;
  for (auto id : ids) {
    auto r = hexch::run_criterion(id, options);
    std::cout << hexch::format_result(r) << std::endl;
    summary.push_back(r.to_json());
    all = all && r.passed;
  }
  std::cout << nlohmann::json{{"suite", suite}, {"passed", all}, {"criteria", summary}}.dump() << '\n';
  return all ? 0 : 1;
}

}  // namespace

auto main(int argc, char** argv) -> int {
  auto app = CLI::App{"Sampling and verification of hierarchically exchangeable arrays"};
  app.require_subcommand(1);
  app.fallthrough();

  auto out_dir = std::string{};
  auto threads = 1u;
  app.add_option("--out", out_dir, "Output directory (overrides the config's \"out\")");
  app.add_option("--threads", threads, "Worker threads, 0 = hardware concurrency")->capture_default_str();

  auto config_path = std::string{};
  auto* run = app.add_subcommand("run", "Run an experiment config");
  run->add_option("config", config_path, "Config JSON file")->required();

  auto suite = std::string{};
  auto right_quantiles = false;
  auto* verify_cmd = app.add_subcommand("verify", "Run an acceptance suite (fast or full)");
  verify_cmd->add_option("suite", suite, "Suite name")->required();
  verify_cmd->add_flag("--right-quantiles", right_quantiles,
                       "Resynthesize with the right-continuous quantile (mutation check)");

  auto* list = app.add_subcommand("list-scenarios", "Print the scenario registry as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    auto code = app.exit(e);
    return code == 0 ? 0 : hexch::exit_config_error;
  }
  hexch::set_thread_count(threads);

  if (*run) {
    auto out = out_dir.empty() ? std::nullopt : std::optional<std::filesystem::path>{out_dir};
    return hexch::run_config_file(config_path, out, std::cerr);
  }
  if (*verify_cmd) return verify(suite, right_quantiles);
  if (*list) {
    auto j = nlohmann::json::array();
    for (const auto& s : hexch::list_scenarios()) j.push_back(s.to_json());
    std::cout << j.dump(2) << '\n';
  }
  return 0;
}
