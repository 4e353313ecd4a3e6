#include "cgt/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>

#include <boost/algorithm/string.hpp>

#include "cgt/error.hpp"
#include "json.hpp"

namespace cgt {

namespace fs = std::filesystem;

TaskDomain TaskConfig::domain() const { return TaskDomain(blocks, weight_domain); }

TaskSetup TaskConfig::setup() const {
  TaskSetup setup;
  setup.domain = domain();
  setup.relational_facts = relational_facts;
  for (const auto& text : seed_facts) {
    const auto prop = parse_prop(setup.domain, text);
    setup.seed_facts.insert(setup.seed_facts.end(), prop.atoms().begin(), prop.atoms().end());
  }
  return setup;
}

const std::vector<std::string>& config_env_names() {
  static const std::vector<std::string> names{
      "CGT_BLOCKS",           "CGT_WEIGHTS",
      "CGT_SEED_FACTS",       "CGT_RELATIONAL_FACTS",
      "CGT_SIMILARITY_THRESHOLD", "CGT_STOPWORD_PATH",
      "CGT_CATALOG_PATH",     "CGT_DICTIONARY_PATH",
  };
  return names;
}

EnvLookup process_env() {
  return [](const std::string& name) -> std::optional<std::string> {
    const char* value = std::getenv(name.c_str());
    if (value == nullptr) return std::nullopt;
    return std::string(value);
  };
}

namespace {

[[noreturn]] void invalid(const std::string& message) {
  throw Error(Errc::invalid_config, message);
}

std::string resolve_path(const std::string& path, const std::string& base_dir) {
  if (path.empty() || base_dir.empty() || fs::path(path).is_absolute()) return path;
  return (fs::path(base_dir) / path).lexically_normal().string();
}

std::vector<std::string> split_list(const std::string& text, const char* separators) {
  std::vector<std::string> parts;
  boost::split(parts, text, boost::is_any_of(separators));
  for (auto& p : parts) boost::trim(p);
  parts.erase(std::remove(parts.begin(), parts.end(), std::string()), parts.end());
  return parts;
}

int parse_int(const std::string& text, const std::string& what) {
  int value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) invalid(what + ": '" + text + "' is not an integer");
  return value;
}

double parse_real(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    double value = std::stod(text, &used);
    if (used == text.size()) return value;
  } catch (const std::exception&) {
  }
  invalid(what + ": '" + text + "' is not a number");
}

bool parse_bool(const std::string& text, const std::string& what) {
  const auto lower = boost::to_lower_copy(boost::trim_copy(text));
  if (lower == "true" || lower == "1" || lower == "yes" || lower == "on") return true;
  if (lower == "false" || lower == "0" || lower == "no" || lower == "off") return false;
  invalid(what + ": '" + text + "' is not a boolean");
}

void validate(const TaskConfig& config) {
  try {
    (void)init_cgs(config.setup());
  } catch (const Error& e) {
    if (e.code() == Errc::invalid_config) throw;
    invalid(std::string("configuration rejected: ") + e.what());
  }
  if (config.similarity_threshold > 1.0) {
    invalid("similarity_threshold must be at most 1");
  }
}

}  // namespace

TaskConfig parse_config(std::istream& in, const std::string& base_dir) {
  static const std::set<std::string> known{
      "blocks",          "weight_domain", "seed_facts",   "relational_facts",
      "similarity_threshold", "stopword_path", "catalog_path", "dictionary_path"};

  TaskConfig config;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    invalid(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) invalid("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (known.count(key) == 0) invalid("unknown config key '" + key + "'");
  }

  try {
    if (j.contains("blocks")) config.blocks = j.at("blocks").get<std::vector<std::string>>();
    if (j.contains("weight_domain")) {
      config.weight_domain = j.at("weight_domain").get<std::vector<int>>();
    }
    if (j.contains("seed_facts")) {
      config.seed_facts = j.at("seed_facts").get<std::vector<std::string>>();
    }
    if (j.contains("relational_facts")) {
      config.relational_facts = j.at("relational_facts").get<bool>();
    }
    if (j.contains("similarity_threshold")) {
      config.similarity_threshold = j.at("similarity_threshold").get<double>();
    }
    auto path = [&](const char* key, std::optional<std::string>& slot) {
      if (!j.contains(key) || j.at(key).is_null()) return;
      slot = resolve_path(j.at(key).get<std::string>(), base_dir);
    };
    path("stopword_path", config.stopword_path);
    path("catalog_path", config.catalog_path);
    path("dictionary_path", config.dictionary_path);
  } catch (const nlohmann::json::type_error& e) {
    invalid(std::string("config has a field of the wrong type: ") + e.what());
  }
  return config;
}

void apply_env_overrides(TaskConfig& config, const EnvLookup& env) {
  if (auto v = env("CGT_BLOCKS")) config.blocks = split_list(*v, ",");
  if (auto v = env("CGT_WEIGHTS")) {
    config.weight_domain.clear();
    for (const auto& w : split_list(*v, ",")) {
      config.weight_domain.push_back(parse_int(w, "CGT_WEIGHTS"));
    }
  }
  if (auto v = env("CGT_SEED_FACTS")) config.seed_facts = split_list(*v, ";");
  if (auto v = env("CGT_RELATIONAL_FACTS")) {
    config.relational_facts = parse_bool(*v, "CGT_RELATIONAL_FACTS");
  }
  if (auto v = env("CGT_SIMILARITY_THRESHOLD")) {
    config.similarity_threshold = parse_real(*v, "CGT_SIMILARITY_THRESHOLD");
  }
  if (auto v = env("CGT_STOPWORD_PATH")) config.stopword_path = *v;
  if (auto v = env("CGT_CATALOG_PATH")) config.catalog_path = *v;
  if (auto v = env("CGT_DICTIONARY_PATH")) config.dictionary_path = *v;
}

TaskConfig load_config(const std::optional<std::string>& path, const EnvLookup& env) {
  TaskConfig config;
  if (path) {
    std::ifstream in(*path);
    if (!in) throw Error(Errc::io, "cannot open config file '" + *path + "'");
    try {
      config = parse_config(in, fs::path(*path).parent_path().string());
    } catch (const Error& e) {
      throw Error(e.code(), *path + ": " + e.what());
    }
  }
  apply_env_overrides(config, env);
  validate(config);
  return config;
}

}  // namespace cgt
