#pragma once

#include <optional>
#include <span>
#include <vector>

#include "adoptpath/ati.hpp"
#include "adoptpath/dataset.hpp"

namespace adoptpath {

/// Direction of an entity relative to the mean curve at the end of the
/// timeline: side after the last crossing, Stable when the curves never
/// cross, Null for entities with no adoption at all.
enum class Trajectory { Uphill, Downhill, Stable, Null };

const char* trajectory_name(Trajectory trajectory);
Trajectory trajectory_from_name(const std::string& name);

/// First time the entity's intensity reaches `fraction` of the regional
/// mean intensity, by linear interpolation on the observed series; empty
/// when the threshold is never met.
struct EntryTime {
  std::optional<double> value;
  double threshold_fraction = 0.0;
};

/// Per-entity summary used for typology: index level, entry timing, latest
/// adoption intensity relative to the mean (percent), and trajectory.
struct FeatureVector {
  double ati = 0.0;
  EntryTime entry;
  double lai = 0.0;
  Trajectory trajectory = Trajectory::Null;
  bool low_fit = false;
};

EntryTime entry_time(const AdoptionSeries& series,
                     const std::vector<double>& mean_series,
                     const TimeAxis& axis, double fraction);

/// Latest adoption intensity: last observed value over last mean value,
/// as a percentage.
double latest_adoption_intensity(const AdoptionSeries& series,
                                 const std::vector<double>& mean_series);

Trajectory latest_trajectory(const AtiResult& result);

/// One threshold fraction's diagnostics in the entry-threshold scan.
struct ThresholdCandidate {
  double fraction = 0.0;
  double coverage = 0.0;       ///< share of entities with an entry time
  int n_entries = 0;
  double sd = 0.0;             ///< population SD of entry times
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  bool passed_coverage = false;
};

struct ThresholdScan {
  std::vector<ThresholdCandidate> candidates;
  double selected_fraction = 0.0;
  /// Set when no candidate met the coverage floor and the scan fell back
  /// to the fraction with the highest coverage.
  bool forced = false;
};

/// Scans candidate fractions and picks the one whose entry-time
/// distribution is closest to normal (smallest |skew| + |excess kurtosis|)
/// among those covering at least `min_coverage` of entities; ties prefer
/// the larger spread, then the smaller fraction.
ThresholdScan select_entry_threshold(
    const RegionDataset& dataset,
    std::span<const double> fractions = {},
    double min_coverage = 0.6);

/// Assembles per-entity features from the fitted region.
std::vector<FeatureVector> compute_features(const RegionDataset& dataset,
                                            const RegionAti& region,
                                            double threshold_fraction);

}  // namespace adoptpath
