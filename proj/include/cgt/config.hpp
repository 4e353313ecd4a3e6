#pragma once

#include <functional>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "cgt/proposition.hpp"
#include "cgt/tracker.hpp"

namespace cgt {

/// Task configuration as read from a JSON file. Paths are absolute or
/// relative to the working directory once loaded.
struct TaskConfig {
  std::vector<std::string> blocks{"red", "blue", "green", "purple", "yellow"};
  std::vector<int> weight_domain{10, 20, 30, 40, 50};
  std::vector<std::string> seed_facts{"red = 10"};
  bool relational_facts = true;
  double similarity_threshold = 0.2;
  std::optional<std::string> stopword_path;
  std::optional<std::string> catalog_path;
  std::optional<std::string> dictionary_path;

  TaskDomain domain() const;
  /// Domain plus parsed seeds. Throws Errc::invalid_seed or a parse error.
  TaskSetup setup() const;
};

/// Names of the recognised environment overrides, in the order applied.
const std::vector<std::string>& config_env_names();

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

/// Reads the process environment.
EnvLookup process_env();

/// Keys: blocks, weight_domain, seed_facts, relational_facts,
/// similarity_threshold, stopword_path, catalog_path, dictionary_path. Missing
/// keys keep their defaults; unknown keys are an error. Relative paths are
/// resolved against `base_dir`.
TaskConfig parse_config(std::istream& in, const std::string& base_dir = "");

/// CGT_BLOCKS and CGT_WEIGHTS are comma-separated, CGT_SEED_FACTS is
/// ';'-separated, CGT_RELATIONAL_FACTS takes true/false/1/0.
void apply_env_overrides(TaskConfig& config, const EnvLookup& env);

/// Defaults, then the file (if given), then the environment; validated.
TaskConfig load_config(const std::optional<std::string>& path, const EnvLookup& env);

}  // namespace cgt
