#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "adoptpath/errors.hpp"
#include "adoptpath/io.hpp"

using namespace adoptpath;

namespace {

FittedCurve sample_fit() {
  FittedCurve fc;
  fc.curve.family = CurveFamily::Logistic;
  fc.curve.params = {80.0, 0.9123456789012345, 5.000000000000001};
  fc.r2 = 0.987654321098765;
  fc.r2_adjusted = 0.98123456789;
  fc.domain_begin = 0.0;
  fc.domain_end = 10.0;
  return fc;
}

}  // namespace

TEST_CASE("format_real round-trips doubles exactly at full precision") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> mant(-1.0, 1.0);
  std::uniform_int_distribution<int> expo(-30, 30);
  for (int i = 0; i < 1000; ++i) {
    const double x = std::ldexp(mant(rng), expo(rng));
    CHECK(parse_real(format_real(x)) == x);
  }
  CHECK(parse_real(format_real(0.1)) == 0.1);
  CHECK(format_real(1.0) == "1");
  CHECK(format_real(-0.5) == "-0.5");
}

TEST_CASE("format_real truncates gracefully at lower precision") {
  CHECK(format_real(1.0 / 3.0, 3) == "0.333");
  CHECK(format_real(12345.678, 4) == "1.235e+04");
}

TEST_CASE("parse_real rejects junk and trailing garbage") {
  CHECK_THROWS_AS(parse_real("abc"), DataError);
  CHECK_THROWS_AS(parse_real("1.5x"), DataError);
  CHECK_THROWS_AS(parse_real(""), DataError);
  CHECK(parse_real("-2.5e3") == -2500.0);
}

TEST_CASE("fits table round-trips curves, domains, and flags") {
  std::vector<FitRow> rows;
  rows.push_back({kMeanCurveId, sample_fit()});
  FitRow poly;
  poly.entity_id = "ent-1";
  poly.curve.curve.family = CurveFamily::Polynomial;
  poly.curve.curve.params = {1.0, -0.25, 0.0625};
  poly.curve.curve.shift = 2.5;
  poly.curve.curve.scale = 2.5;
  poly.curve.r2 = 1.0;
  poly.curve.r2_adjusted = 1.0;
  poly.curve.domain_begin = 0.0;
  poly.curve.domain_end = 5.0;
  poly.curve.low_fit = true;
  rows.push_back(poly);

  std::ostringstream out;
  write_fits_csv(out, rows);
  std::istringstream in(out.str());
  auto back = read_fits_csv(in);
  REQUIRE(back.size() == 2);
  CHECK(back[0].entity_id == kMeanCurveId);
  CHECK(back[0].curve.curve.family == CurveFamily::Logistic);
  CHECK(back[0].curve.curve.params == rows[0].curve.curve.params);
  CHECK(back[0].curve.r2 == rows[0].curve.r2);
  CHECK(back[1].curve.curve.shift == 2.5);
  CHECK(back[1].curve.low_fit);
  CHECK(back[1].curve.domain_end == 5.0);
  CHECK(find_fit(back, "ent-1").curve.family == CurveFamily::Polynomial);
  CHECK_THROWS_AS(find_fit(back, "missing"), DataError);
}

TEST_CASE("fits reader rejects a parameter count that contradicts the family") {
  std::istringstream in(
      "entity_id,family,params,shift,scale,domain_begin,domain_end,r2,"
      "r2_adjusted,low_fit\n"
      "e,Logistic,1;2,0,1,0,10,0.99,0.98,0\n");
  CHECK_THROWS_AS(read_fits_csv(in), DataError);
}

TEST_CASE("ati and feature tables round-trip including empty entries") {
  std::vector<AtiRow> ati = {
      {"a", 133.33333333333334, 116.66666666666667, 1, false},
      {"z", 0.0, 0.0, 0, true},
  };
  std::ostringstream out;
  write_ati_csv(out, ati);
  std::istringstream in(out.str());
  auto ati_back = read_ati_csv(in);
  REQUIRE(ati_back.size() == 2);
  CHECK(ati_back[0].ati == ati[0].ati);
  CHECK(ati_back[1].low_fit);

  std::vector<FeatureRow> feats = {
      {"a", 116.66666666666667, 0.5, 150.0, Trajectory::Uphill, false},
      {"z", 0.0, std::nullopt, 0.0, Trajectory::Null, false},
  };
  std::ostringstream fout;
  write_features_csv(fout, feats);
  std::istringstream fin(fout.str());
  auto feats_back = read_features_csv(fin);
  REQUIRE(feats_back.size() == 2);
  CHECK(feats_back[0].entry_time == feats[0].entry_time);
  CHECK_FALSE(feats_back[1].entry_time.has_value());
  CHECK(feats_back[1].trajectory == Trajectory::Null);
}

TEST_CASE("paths table round-trips profiles and frequencies cover all paths") {
  std::vector<PathRow> rows = {
      {"a",
       {Level::High, EntryLevel::Early, Trajectory::Stable, Level::High},
       AdoptionPath::Leading,
       "table:leading"},
      {"z",
       {Level::Naught, EntryLevel::Null, Trajectory::Null, Level::Naught},
       AdoptionPath::NonAdopting,
       "table:non-adopting"},
  };
  std::ostringstream out;
  write_paths_csv(out, rows);
  std::istringstream in(out.str());
  auto back = read_paths_csv(in);
  REQUIRE(back.size() == 2);
  CHECK(back[0].profile == rows[0].profile);
  CHECK(back[0].path == AdoptionPath::Leading);
  CHECK(back[1].rule_id == "table:non-adopting");

  std::ostringstream freq;
  write_path_frequencies_csv(freq, rows);
  const std::string text = freq.str();
  // Every path appears, including the six with zero members.
  for (const char* name :
       {"NonAdopting", "Lagging", "DecliningModerate", "Moderate",
        "Decelerating", "Leaping", "Accelerating", "Leading"}) {
    CAPTURE(name);
    CHECK(text.find(name) != std::string::npos);
  }
  CHECK(std::count(text.begin(), text.end(), '\n') == 9);  // header + 8 rows
}

TEST_CASE("matrix and magnitude tables carry their totals consistently") {
  std::vector<TransitionRecord> records = {
      {"a", AdoptionPath::Lagging, AdoptionPath::Leaping, 4},
      {"b", AdoptionPath::Leading, AdoptionPath::Leading, 0},
  };
  auto matrix = transition_matrix(records);
  std::ostringstream mout;
  write_matrix_csv(mout, matrix);
  const std::string mtext = mout.str();
  // 64 cells plus the header line.
  CHECK(std::count(mtext.begin(), mtext.end(), '\n') == 65);
  CHECK(mtext.find("Lagging,Leaping,1,50") != std::string::npos);

  auto dist = magnitude_distribution(records);
  std::ostringstream gout;
  write_magnitudes_csv(gout, dist);
  CHECK(gout.str().find("share_up") != std::string::npos);
  CHECK(gout.str().find("4,1") != std::string::npos);
}

TEST_CASE("stats table reports moment rows and the paired test verdict") {
  std::vector<MomentRow> rows(2);
  rows[0].metric = "ati";
  rows[0].summary = {3, 100.0, 98.0, 12.0, 0.1, -0.5};
  rows[1].metric = "lai";
  rows[1].summary = {3, 90.0, 91.0, 15.0, -0.2, 0.3};
  WilcoxonResult w;
  w.n_used = 6;
  w.w = 0.0;
  w.p_value = 0.03125;
  w.exact = true;
  std::ostringstream out;
  write_stats_csv(out, rows, "ati_vs_lai", w);
  const std::string text = out.str();
  CHECK(text.find("ati,3,100,") != std::string::npos);
  CHECK(text.find("ati_vs_lai,6,0,0.03125,exact") != std::string::npos);

  WilcoxonResult degen;
  degen.degenerate = true;
  std::ostringstream dout;
  write_stats_csv(dout, rows, "ati_vs_lai", degen);
  CHECK(dout.str().find("degenerate") != std::string::npos);
}

TEST_CASE("threshold scan table marks the selected fraction") {
  ThresholdScan scan;
  for (double f : {0.1, 0.2}) {
    ThresholdCandidate c;
    c.fraction = f;
    c.coverage = 0.9;
    c.n_entries = 9;
    c.passed_coverage = true;
    scan.candidates.push_back(c);
  }
  scan.selected_fraction = 0.2;
  std::ostringstream out;
  write_threshold_scan_csv(out, scan);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);  // header
  std::getline(in, line);
  CHECK(line.back() == '0');  // 0.1 row not selected
  std::getline(in, line);
  CHECK(line.back() == '1');  // 0.2 row selected
}

TEST_CASE("medians table emits one block per path in path order") {
  TimeAxis ax;
  ax.points = {0, 1};
  ax.labels = {"0", "1"};
  std::vector<PathMedianCurve> curves(2);
  curves[0].path = AdoptionPath::Lagging;
  curves[0].n_members = 3;
  curves[0].values = {0.0, 2.5};
  curves[1].path = AdoptionPath::Leading;
  curves[1].n_members = 1;
  curves[1].values = {5.0, 9.0};
  std::ostringstream out;
  write_medians_csv(out, ax, curves);
  const std::string text = out.str();
  CHECK(text.find("Lagging,3,0,0") != std::string::npos);
  CHECK(text.find("Lagging,3,1,2.5") != std::string::npos);
  CHECK(text.find("Leading,1,1,9") != std::string::npos);
  CHECK(text.find("Lagging") < text.find("Leading"));
}
