// Command-line front end: track, eval, oracle-check, repl.

#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <unistd.h>

#include "CLI11.hpp"
#include "cgt/commands.hpp"
#include "cgt/config.hpp"

namespace {

const std::map<std::string, cgt::ExtractorKind> kExtractors{
    {"dictionary", cgt::ExtractorKind::dictionary},
    {"similarity", cgt::ExtractorKind::similarity},
    {"dictionary-then-similarity", cgt::ExtractorKind::dictionary_then_similarity},
};

const std::map<std::string, cgt::LabelSource> kLabels{
    {"gold", cgt::LabelSource::gold},
    {"heuristic", cgt::LabelSource::heuristic},
};

const std::map<std::string, cgt::ReportFormat> kFormats{
    {"markdown", cgt::ReportFormat::markdown},
    {"csv", cgt::ReportFormat::csv_series},
    {"structured", cgt::ReportFormat::structured},
};

std::string env_help() {
  std::string text =
      "Configuration is read from --config (JSON) and then overridden by the environment:\n";
  for (const auto& name : cgt::config_env_names()) text += "  " + name + "\n";
  text += "Lists: CGT_BLOCKS and CGT_WEIGHTS comma-separated, CGT_SEED_FACTS ';'-separated.";
  return text;
}

struct Options {
  std::optional<std::string> config;
  std::string extractor = "dictionary";
  std::string labels = "gold";
  std::string format = "markdown";
  std::optional<std::string> out;
  std::string log;
  std::string pred;
  std::string gold;
  std::size_t trials = 1000;
  std::uint64_t seed = 0;
};

int with_output(const std::optional<std::string>& path, const std::function<int(std::ostream&)>& body) {
  if (!path) return body(std::cout);
  std::ofstream file(*path);
  if (!file) {
    std::cerr << "error: cannot write '" << *path << "'\n";
    return 2;
  }
  return body(file);
}

int with_input(const std::string& path, const std::function<int(std::istream&)>& body) {
  if (path == "-") return body(std::cin);
  std::ifstream file(path);
  if (!file) {
    std::cerr << "error: cannot open '" << path << "'\n";
    return 2;
  }
  return body(file);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Common-ground tracker for task-oriented dialogue"};
  app.footer(env_help());
  app.require_subcommand(1);
  app.fallthrough();

  Options opt;
  app.add_option("--config", opt.config, "JSON task configuration")->check(CLI::ExistingFile);

  auto add_resolution = [&](CLI::App* cmd) {
    cmd->add_option("--extractor", opt.extractor, "proposition extractor")
        ->check(CLI::IsMember({"dictionary", "similarity", "dictionary-then-similarity"}));
    cmd->add_option("--labels", opt.labels, "move label source")
        ->check(CLI::IsMember({"gold", "heuristic"}));
    cmd->add_option("--out", opt.out, "output file (default stdout)");
  };

  auto* track = app.add_subcommand("track", "run the closure rules over a move log");
  track->add_option("log", opt.log, "move log (JSON lines, '-' for stdin)")->required();
  add_resolution(track);

  auto* eval = app.add_subcommand("eval", "score a predicted move log against a gold one");
  eval->add_option("pred", opt.pred, "predicted move log")->required();
  eval->add_option("gold", opt.gold, "gold move log")->required();
  add_resolution(eval);
  eval->add_option("--format", opt.format, "report format")
      ->check(CLI::IsMember({"markdown", "csv", "structured"}));

  auto* oracle = app.add_subcommand("oracle-check", "compare the tracker with the evidence kernel");
  oracle->add_option("--trials", opt.trials, "number of random move sequences");
  oracle->add_option("--seed", opt.seed, "random seed");
  oracle->add_option("--out", opt.out, "output file (default stdout)");

  auto* repl = app.add_subcommand("repl", "step through moves interactively");

  CLI11_PARSE(app, argc, argv);

  cgt::TaskConfig config;
  try {
    config = cgt::load_config(opt.config, cgt::process_env());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }

  if (track->parsed()) {
    return with_input(opt.log, [&](std::istream& in) {
      return with_output(opt.out, [&](std::ostream& out) {
        return cgt::cmd_track(config, {in, opt.log}, kExtractors.at(opt.extractor),
                              kLabels.at(opt.labels), {out, std::cerr});
      });
    });
  }
  if (eval->parsed()) {
    return with_input(opt.pred, [&](std::istream& pred) {
      return with_input(opt.gold, [&](std::istream& gold) {
        return with_output(opt.out, [&](std::ostream& out) {
          return cgt::cmd_eval(config, {pred, opt.pred}, {gold, opt.gold},
                               kExtractors.at(opt.extractor), kLabels.at(opt.labels),
                               kFormats.at(opt.format), {out, std::cerr});
        });
      });
    });
  }
  if (oracle->parsed()) {
    return with_output(opt.out, [&](std::ostream& out) {
      return cgt::cmd_oracle_check(config, opt.trials, opt.seed, {out, std::cerr});
    });
  }
  if (repl->parsed()) {
    return cgt::cmd_repl(config, std::cin, {std::cout, std::cerr}, isatty(STDIN_FILENO) != 0);
  }
  return 0;
}
