#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "adoptpath/errors.hpp"
#include "adoptpath/pipeline.hpp"

using namespace adoptpath;
namespace fs = std::filesystem;

namespace {

const std::string kRegion12 = std::string(ADOPTPATH_TEST_DATA) + "/region12.csv";

fs::path fresh_dir(const std::string& tag) {
  fs::path dir = fs::temp_directory_path() / ("adoptpath-" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd =
      std::string(ADOPTPATH_CLI) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

RunConfig config_for(const fs::path& out) {
  RunConfig cfg;
  cfg.input_path = kRegion12;
  cfg.output_dir = out.string();
  return cfg;
}

const std::vector<std::string> kArtifacts = {
    "fits.csv",       "ati.csv",         "threshold_scan.csv",
    "features.csv",   "paths.csv",       "path_frequencies.csv",
    "transitions.csv", "matrix.csv",     "magnitudes.csv",
    "medians.csv",    "stats.csv",       "manifest.json"};

std::map<std::string, std::string> path_by_entity(const fs::path& out) {
  std::ifstream in(out / "paths.csv");
  REQUIRE(in);
  std::map<std::string, std::string> got;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, ',')) cols.push_back(col);
    REQUIRE(cols.size() == 7);
    got[cols[0]] = cols[5];
  }
  return got;
}

}  // namespace

TEST_CASE("the twelve-entity region classifies to its designed paths") {
  auto out = fresh_dir("designed");
  run_all(config_for(out));
  auto got = path_by_entity(out);
  const std::map<std::string, std::string> expected = {
      {"apex-utility", "Leading"},
      {"surge-coop", "Accelerating"},
      {"plateau-energy", "Decelerating"},
      {"lateblaze-power", "Leaping"},
      {"steady-grid", "Moderate"},
      {"midline-solar", "Moderate"},
      {"fadeout-wind", "DecliningModerate"},
      {"trickle-south", "Lagging"},
      {"trickle-north", "Lagging"},
      {"trickle-east", "Lagging"},
      {"trickle-west", "Lagging"},
      {"dormant-valley", "NonAdopting"},
  };
  CHECK(got == expected);
}

TEST_CASE("run_all writes the full bundle and a canonical manifest") {
  auto out = fresh_dir("bundle");
  run_all(config_for(out));
  for (const auto& name : kArtifacts) {
    CAPTURE(name);
    CHECK(fs::exists(out / name));
  }
  const std::string manifest = slurp(out / "manifest.json");
  // Canonical section order in the manifest.
  std::size_t pos = 0;
  for (const char* key : {"\"tool\"", "\"version\"", "\"config\"",
                          "\"dataset\"", "\"fit\"", "\"ati\"", "\"features\"",
                          "\"classify\"", "\"transitions\""}) {
    const std::size_t next = manifest.find(key);
    CAPTURE(key);
    REQUIRE(next != std::string::npos);
    CHECK(next > pos);
    pos = next;
  }
  CHECK(manifest.find("\"feasible_profiles\": 63") != std::string::npos);
  CHECK(manifest.find("\"threshold_fraction\": 0.2") != std::string::npos);
  CHECK(manifest.find("\"entities\": 12") != std::string::npos);
}

TEST_CASE("two identical runs produce byte-identical bundles") {
  auto out1 = fresh_dir("det1");
  auto out2 = fresh_dir("det2");
  run_all(config_for(out1));
  run_all(config_for(out2));
  for (const auto& name : kArtifacts) {
    CAPTURE(name);
    CHECK(slurp(out1 / name) == slurp(out2 / name));
  }
}

TEST_CASE("thread count does not change a single byte") {
  auto out1 = fresh_dir("thr1");
  auto out2 = fresh_dir("thr2");
  auto cfg1 = config_for(out1);
  auto cfg2 = config_for(out2);
  cfg2.threads = 4;
  run_all(cfg1);
  run_all(cfg2);
  for (const auto& name : kArtifacts) {
    CAPTURE(name);
    CHECK(slurp(out1 / name) == slurp(out2 / name));
  }
}

TEST_CASE("staged runs reproduce the monolithic bundle byte for byte") {
  auto mono = fresh_dir("mono");
  auto staged = fresh_dir("staged");
  run_all(config_for(mono));
  auto cfg = config_for(staged);
  run_stage_fit(cfg);
  run_stage_ati(cfg);
  run_stage_features(cfg);
  run_stage_classify(cfg, false);
  run_stage_transitions(cfg);
  run_stage_stats(cfg);
  for (const auto& name : kArtifacts) {
    CAPTURE(name);
    CHECK(slurp(mono / name) == slurp(staged / name));
  }
}

TEST_CASE("stages demand their prerequisites") {
  auto out = fresh_dir("prereq");
  auto cfg = config_for(out);
  CHECK_THROWS_AS(run_stage_ati(cfg), ConfigError);
  CHECK_THROWS_AS(run_stage_transitions(cfg), ConfigError);
  CHECK_THROWS_AS(run_stage_stats(cfg), ConfigError);
  run_stage_fit(cfg);
  CHECK_THROWS_AS(run_stage_features(cfg), ConfigError);  // needs ati.csv
}

TEST_CASE("classify can re-derive entries at an overridden threshold") {
  auto out = fresh_dir("override");
  auto cfg = config_for(out);
  run_all(cfg);
  const std::string before = slurp(out / "paths.csv");
  cfg.threshold_auto = false;
  cfg.threshold_fraction = 0.55;
  run_stage_classify(cfg, true);
  const std::string manifest = slurp(out / "manifest.json");
  CHECK(manifest.find("\"threshold_override\": 0.55") != std::string::npos);
  // Entries shift to a much later threshold; the table must still parse
  // and keep one row per entity.
  auto got = path_by_entity(out);
  CHECK(got.size() == 12);
  CHECK(got.at("dormant-valley") == "NonAdopting");
}

TEST_CASE("config validation rejects out-of-range settings") {
  RunConfig cfg;
  cfg.input_path = kRegion12;
  cfg.threshold_auto = false;
  cfg.threshold_fraction = 1.5;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.threshold_fraction = 0.2;
  cfg.r2_min = 1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.r2_min = 0.9;
  cfg.precision = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.precision = 18;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.precision = 17;
  cfg.quad_rel_tol = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.quad_rel_tol = 1e-10;
  cfg.threads = -1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.threads = 1;
  cfg.validate();  // now clean
}

TEST_CASE("an explicit split time must be interior") {
  auto out = fresh_dir("split");
  auto cfg = config_for(out);
  cfg.split_mid = false;
  cfg.split_time = 99.0;
  CHECK_THROWS_AS(run_pipeline(cfg), ConfigError);
  cfg.split_time = 2.0;
  auto res = run_pipeline(cfg);
  CHECK(res.split.split_time == 2.0);
}

TEST_CASE("feasibility count matches the exhaustive enumeration") {
  CHECK(count_feasible_profiles() == 63);
}

TEST_CASE("the pairwise index-versus-intensity test runs over all entities") {
  auto out = fresh_dir("wilcox");
  auto res = run_pipeline(config_for(out));
  CHECK(res.wilcoxon.n_used >= 5);
  CHECK_FALSE(res.wilcoxon.degenerate);
  REQUIRE(res.moment_rows.size() == 3);
  CHECK(res.moment_rows[0].metric == "ati");
  CHECK(res.moment_rows[1].metric == "lai");
  CHECK(res.moment_rows[2].metric == "entry_time");
  CHECK(res.moment_rows[2].summary.n == 11);  // one entity never enters
}

TEST_CASE("cli: run exits zero and writes the bundle") {
  auto out = fresh_dir("cli-run");
  CHECK(run_cli("run -i " + kRegion12 + " -o " + out.string()) == 0);
  for (const auto& name : kArtifacts) {
    CAPTURE(name);
    CHECK(fs::exists(out / name));
  }
}

TEST_CASE("cli: staged invocations equal the monolithic run") {
  auto mono = fresh_dir("cli-mono");
  auto staged = fresh_dir("cli-staged");
  REQUIRE(run_cli("run -i " + kRegion12 + " -o " + mono.string()) == 0);
  const std::string base = " -i " + kRegion12 + " -o " + staged.string();
  for (const char* stage :
       {"fit", "ati", "features", "classify", "transitions", "stats"}) {
    CAPTURE(stage);
    REQUIRE(run_cli(std::string(stage) + base) == 0);
  }
  for (const auto& name : kArtifacts) {
    CAPTURE(name);
    CHECK(slurp(mono / name) == slurp(staged / name));
  }
}

TEST_CASE("cli: exit codes distinguish config from data problems") {
  auto out = fresh_dir("cli-exit");
  // Unknown flag and bad values are configuration errors (2).
  CHECK(run_cli("run --no-such-flag") == 2);
  CHECK(run_cli("run -i " + kRegion12 + " -o " + out.string() +
                " --split-time 99") == 2);
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("ati -i " + kRegion12 + " -o " + out.string()) == 2);
  // A missing input file is a data error (1).
  CHECK(run_cli("run -i /nonexistent.csv -o " + out.string()) == 1);
  // Help and version are successes.
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("--version") == 0);
  CHECK(run_cli("run --help") == 0);
}

TEST_CASE("cli: malformed panels are data errors") {
  auto out = fresh_dir("cli-bad");
  const fs::path bad = out / "bad.csv";
  std::ofstream(bad) << "entity_id,time,value\na,0,1\na,0,2\n";
  CHECK(run_cli("run -i " + bad.string() + " -o " + out.string()) == 1);
}
