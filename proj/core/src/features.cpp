#include "adoptpath/features.hpp"

#include <algorithm>
#include <cmath>

#include "adoptpath/errors.hpp"
#include "adoptpath/stats.hpp"

namespace adoptpath {

namespace {

constexpr double kDefaultFractions[] = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6};

}  // namespace

const char* trajectory_name(Trajectory trajectory) {
  switch (trajectory) {
    case Trajectory::Uphill: return "Uphill";
    case Trajectory::Downhill: return "Downhill";
    case Trajectory::Stable: return "Stable";
    case Trajectory::Null: return "Null";
  }
  throw DataError("features: unknown trajectory");
}

Trajectory trajectory_from_name(const std::string& name) {
  for (auto t : {Trajectory::Uphill, Trajectory::Downhill, Trajectory::Stable,
                 Trajectory::Null}) {
    if (name == trajectory_name(t)) return t;
  }
  throw DataError("features: unknown trajectory name '" + name + "'");
}

EntryTime entry_time(const AdoptionSeries& series,
                     const std::vector<double>& mean_series,
                     const TimeAxis& axis, double fraction) {
  if (!(fraction > 0.0) || !(fraction < 1.0)) {
    throw ConfigError("features: threshold fraction must lie in (0, 1)");
  }
  if (series.values.size() != axis.size() ||
      mean_series.size() != axis.size()) {
    throw DataError("features: series length does not match axis");
  }
  EntryTime entry;
  entry.threshold_fraction = fraction;

  const auto& v = series.values;
  const auto& m = mean_series;
  // g(t) = intensity - fraction * mean_intensity, piecewise linear between
  // observations.  "Reached" needs g >= 0 through a non-vacuous comparison:
  // a point where both sides are zero does not count.
  auto g = [&](std::size_t k) { return v[k] - fraction * m[k]; };
  auto reached = [&](std::size_t k) {
    return g(k) >= 0.0 && !(v[k] == 0.0 && m[k] == 0.0);
  };
  for (std::size_t k = 0; k < axis.size(); ++k) {
    if (!reached(k)) continue;
    if (k == 0) {
      entry.value = axis.points[0];
    } else if (g(k - 1) < 0.0) {
      // Interpolate the up-crossing inside the segment.
      const double w = -g(k - 1) / (g(k) - g(k - 1));
      entry.value = axis.points[k - 1] +
                    w * (axis.points[k] - axis.points[k - 1]);
    } else {
      // The previous point already satisfied g >= 0 but vacuously (both
      // sides zero); the threshold is held from that point on.
      entry.value = axis.points[k - 1];
    }
    return entry;
  }
  return entry;
}

double latest_adoption_intensity(const AdoptionSeries& series,
                                 const std::vector<double>& mean_series) {
  if (mean_series.empty() || series.values.empty()) {
    throw DataError("features: empty series");
  }
  const double m = mean_series.back();
  if (!(m > 0.0)) {
    throw DataError("features: mean intensity is zero at the last time");
  }
  return series.values.back() / m * 100.0;
}

Trajectory latest_trajectory(const AtiResult& result) {
  if (result.ati == 0.0) return Trajectory::Null;
  if (result.intersections.empty()) return Trajectory::Stable;
  return result.intersections.back().alpha_sign > 0 ? Trajectory::Uphill
                                                    : Trajectory::Downhill;
}

ThresholdScan select_entry_threshold(const RegionDataset& dataset,
                                     std::span<const double> fractions,
                                     double min_coverage) {
  if (fractions.empty()) fractions = kDefaultFractions;
  if (!(min_coverage > 0.0) || min_coverage > 1.0) {
    throw ConfigError("features: coverage floor must lie in (0, 1]");
  }
  ThresholdScan scan;
  const auto n_entities = static_cast<double>(dataset.entity_count());
  for (double f : fractions) {
    ThresholdCandidate c;
    c.fraction = f;
    std::vector<double> entries;
    for (const auto& s : dataset.series) {
      const EntryTime e = entry_time(s, dataset.mean_series, dataset.axis, f);
      if (e.value) entries.push_back(*e.value);
    }
    c.n_entries = static_cast<int>(entries.size());
    c.coverage = entries.size() / n_entities;
    c.passed_coverage = c.coverage >= min_coverage;
    if (entries.size() >= 2) {
      const MomentSummary m = moments(entries);
      c.sd = m.sd;
      c.skewness = m.skewness;
      c.excess_kurtosis = m.excess_kurtosis;
    }
    scan.candidates.push_back(c);
  }

  const ThresholdCandidate* best = nullptr;
  for (const auto& c : scan.candidates) {
    if (!c.passed_coverage) continue;
    if (!best) {
      best = &c;
      continue;
    }
    const double score = std::abs(c.skewness) + std::abs(c.excess_kurtosis);
    const double best_score =
        std::abs(best->skewness) + std::abs(best->excess_kurtosis);
    if (score < best_score || (score == best_score && c.sd > best->sd)) {
      best = &c;
    }
  }
  if (!best) {
    // Nothing met the coverage floor: fall back to the widest coverage.
    scan.forced = true;
    best = &scan.candidates.front();
    for (const auto& c : scan.candidates) {
      if (c.coverage > best->coverage) best = &c;
    }
  }
  scan.selected_fraction = best->fraction;
  return scan;
}

std::vector<FeatureVector> compute_features(const RegionDataset& dataset,
                                            const RegionAti& region,
                                            double threshold_fraction) {
  if (region.results.size() != dataset.entity_count()) {
    throw DataError("features: region fit does not match dataset");
  }
  std::vector<FeatureVector> features(dataset.entity_count());
  for (std::size_t i = 0; i < dataset.entity_count(); ++i) {
    FeatureVector& fv = features[i];
    fv.ati = region.results[i].ati;
    fv.entry = entry_time(dataset.series[i], dataset.mean_series, dataset.axis,
                          threshold_fraction);
    fv.lai = latest_adoption_intensity(dataset.series[i], dataset.mean_series);
    fv.trajectory = latest_trajectory(region.results[i]);
    fv.low_fit = region.curves[i].low_fit;
  }
  return features;
}

}  // namespace adoptpath
