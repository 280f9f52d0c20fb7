// adoptpath: fits cumulative adoption curves for a region of entities,
// scores each entity's adoption-over-time index against the regional mean,
// classifies adoption paths, and reports transitions between timeline
// halves.  Subcommands either run the whole pipeline (`run`) or one stage
// at a time over a shared output directory.

#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <iostream>
#include <string>

#include "adoptpath/errors.hpp"
#include "adoptpath/pipeline.hpp"

namespace {

constexpr int kExitData = 1;
constexpr int kExitConfig = 2;

int precision_from_env(int fallback) {
  const char* env = std::getenv("ADOPTPATH_PRECISION");
  if (!env || !*env) return fallback;
  int value = 0;
  const std::string text(env);
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw adoptpath::ConfigError(
        "ADOPTPATH_PRECISION must be an integer in [1, 17]");
  }
  return value;
}

struct CliState {
  adoptpath::RunConfig config;
  std::string selection = "adjusted";
  std::string delimiter = ",";
  bool has_threshold = false;
  bool has_split = false;

  void finalize() {
    if (delimiter.size() != 1) {
      throw adoptpath::ConfigError("delimiter must be a single character");
    }
    config.delimiter = delimiter[0];
    if (selection == "adjusted") {
      config.selection = adoptpath::FitOptions::Selection::AdjustedR2;
    } else if (selection == "plain") {
      config.selection = adoptpath::FitOptions::Selection::PlainR2;
    } else {
      throw adoptpath::ConfigError("selection must be 'adjusted' or 'plain'");
    }
    config.threshold_auto = !has_threshold;
    config.split_mid = !has_split;
    config.precision = precision_from_env(config.precision);
  }
};

void add_common_options(CLI::App* cmd, CliState& state) {
  cmd->add_option("-i,--input", state.config.input_path,
                  "Input CSV panel (entity_id,time,value or "
                  "entity_id,time,pv_area,built_area)");
  cmd->add_option("-o,--out", state.config.output_dir,
                  "Output directory (shared by all stages)");
  cmd->add_option("--delimiter", state.delimiter, "Input field delimiter");
  cmd->add_option("--threshold-fraction", state.config.threshold_fraction,
                  "Entry threshold as a fraction of the mean intensity "
                  "(default: scan candidates and pick automatically)")
      ->trigger_on_parse()
      ->each([&state](const std::string&) { state.has_threshold = true; });
  cmd->add_option("--r2-min", state.config.r2_min,
                  "Admission threshold on r2 for curve selection");
  cmd->add_option("--selection", state.selection,
                  "Selection metric: 'adjusted' or 'plain' r2");
  cmd->add_option("--split-time", state.config.split_time,
                  "Transition split time (default: timeline midpoint)")
      ->trigger_on_parse()
      ->each([&state](const std::string&) { state.has_split = true; });
  cmd->add_option("--quad-rel-tol", state.config.quad_rel_tol,
                  "Relative tolerance for curve integration");
  cmd->add_option("--precision", state.config.precision,
                  "Significant digits in outputs (1-17; env "
                  "ADOPTPATH_PRECISION overrides)");
  cmd->add_option("--threads", state.config.threads,
                  "Worker threads for fitting (0 = all cores)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Adoption path analysis: curve fitting, adoption-over-time index, "
      "typology, and transitions"};
  app.set_version_flag("--version", "adoptpath 1.0.0");
  app.require_subcommand(1);

  CliState state;
  CLI::App* cmd_run = app.add_subcommand("run", "Run the whole pipeline");
  CLI::App* cmd_fit =
      app.add_subcommand("fit", "Fit curves, write fits.csv");
  CLI::App* cmd_ati = app.add_subcommand(
      "ati", "Score the adoption-over-time index, write ati.csv");
  CLI::App* cmd_features = app.add_subcommand(
      "features", "Extract entry/latest-intensity/trajectory features");
  CLI::App* cmd_classify = app.add_subcommand(
      "classify", "Assign adoption paths, write paths.csv");
  CLI::App* cmd_transitions = app.add_subcommand(
      "transitions", "Compare timeline halves, write transition tables");
  CLI::App* cmd_stats =
      app.add_subcommand("stats", "Write distribution statistics");
  for (CLI::App* cmd : {cmd_run, cmd_fit, cmd_ati, cmd_features, cmd_classify,
                        cmd_transitions, cmd_stats}) {
    add_common_options(cmd, state);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    state.finalize();
    if (cmd_run->parsed()) {
      adoptpath::run_all(state.config);
    } else if (cmd_fit->parsed()) {
      adoptpath::run_stage_fit(state.config);
    } else if (cmd_ati->parsed()) {
      adoptpath::run_stage_ati(state.config);
    } else if (cmd_features->parsed()) {
      adoptpath::run_stage_features(state.config);
    } else if (cmd_classify->parsed()) {
      adoptpath::run_stage_classify(state.config, state.has_threshold);
    } else if (cmd_transitions->parsed()) {
      adoptpath::run_stage_transitions(state.config);
    } else if (cmd_stats->parsed()) {
      adoptpath::run_stage_stats(state.config);
    }
  } catch (const adoptpath::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const adoptpath::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return 0;
}
