#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "adoptpath/features.hpp"
#include "adoptpath/fit.hpp"
#include "adoptpath/stats.hpp"
#include "adoptpath/transitions.hpp"
#include "adoptpath/typology.hpp"

namespace adoptpath {

/// Reserved entity id under which the regional mean curve is stored in the
/// fits table; rejected as an input entity id.
inline constexpr const char* kMeanCurveId = "__regional_mean__";

/// Shortest locale-independent decimal form with the given number of
/// significant digits (17 by default, enough to reproduce the double
/// exactly on re-parse).
std::string format_real(double value, int precision = 17);
/// Strict re-parse of format_real output; throws DataError on junk.
double parse_real(const std::string& text);

struct FitRow {
  std::string entity_id;
  FittedCurve curve;
};

void write_fits_csv(std::ostream& out, std::span<const FitRow> rows,
                    int precision = 17);
std::vector<FitRow> read_fits_csv(std::istream& in);
/// Looks up a row by entity id; throws DataError when absent.
const FittedCurve& find_fit(std::span<const FitRow> rows,
                            const std::string& entity_id);

struct AtiRow {
  std::string entity_id;
  double a_norm = 0.0;
  double ati = 0.0;
  int n_intersections = 0;
  bool low_fit = false;
};

void write_ati_csv(std::ostream& out, std::span<const AtiRow> rows,
                   int precision = 17);
std::vector<AtiRow> read_ati_csv(std::istream& in);

struct FeatureRow {
  std::string entity_id;
  double ati = 0.0;
  std::optional<double> entry_time;
  double lai = 0.0;
  Trajectory trajectory = Trajectory::Null;
  bool low_fit = false;
};

void write_features_csv(std::ostream& out, std::span<const FeatureRow> rows,
                        int precision = 17);
std::vector<FeatureRow> read_features_csv(std::istream& in);

struct PathRow {
  std::string entity_id;
  AdoptionProfile profile;
  AdoptionPath path = AdoptionPath::NonAdopting;
  std::string rule_id;
};

void write_paths_csv(std::ostream& out, std::span<const PathRow> rows);
std::vector<PathRow> read_paths_csv(std::istream& in);

void write_path_frequencies_csv(std::ostream& out,
                                std::span<const PathRow> rows,
                                int precision = 17);

void write_threshold_scan_csv(std::ostream& out, const ThresholdScan& scan,
                              int precision = 17);

void write_transitions_csv(std::ostream& out,
                           std::span<const TransitionRecord> records);
void write_matrix_csv(std::ostream& out, const TransitionMatrix& matrix,
                      int precision = 17);
void write_magnitudes_csv(std::ostream& out,
                          const MagnitudeDistribution& distribution,
                          int precision = 17);
void write_medians_csv(std::ostream& out, const TimeAxis& axis,
                       std::span<const PathMedianCurve> curves,
                       int precision = 17);

/// One named sample's moment summary in the stats table.
struct MomentRow {
  std::string metric;
  MomentSummary summary;
};

void write_stats_csv(std::ostream& out, std::span<const MomentRow> moments,
                     const std::string& comparison,
                     const WilcoxonResult& wilcoxon, int precision = 17);

}  // namespace adoptpath
