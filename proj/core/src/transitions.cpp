#include "adoptpath/transitions.hpp"

#include <algorithm>
#include <cmath>

#include "adoptpath/errors.hpp"
#include "adoptpath/stats.hpp"

namespace adoptpath {

namespace {

double interpolate(const TimeAxis& axis, const std::vector<double>& values,
                   double t) {
  const auto& pts = axis.points;
  auto it = std::upper_bound(pts.begin(), pts.end(), t);
  if (it == pts.begin()) return values.front();
  if (it == pts.end()) return values.back();
  const auto k = static_cast<std::size_t>(it - pts.begin());
  const double w = (t - pts[k - 1]) / (pts[k] - pts[k - 1]);
  return values[k - 1] + w * (values[k] - values[k - 1]);
}

AtiResult zero_result() {
  AtiResult r;
  r.delta = -100.0;
  return r;
}

}  // namespace

SplitFeatures split_features(const RegionDataset& dataset,
                             const RegionAti& region, double split_time,
                             double entry_fraction,
                             const QuadratureOptions& quad) {
  const double a = dataset.axis.front();
  const double b = dataset.axis.back();
  if (!(split_time > a) || !(split_time < b)) {
    throw ConfigError("transitions: split time must lie inside the timeline");
  }
  if (region.curves.size() != dataset.entity_count()) {
    throw DataError("transitions: region fit does not match dataset");
  }

  SplitFeatures out;
  out.split_time = split_time;
  const double mean_auc_1 =
      integrate_curve(region.mean_curve, a, split_time, quad);
  const double mean_auc_2 =
      integrate_curve(region.mean_curve, split_time, b, quad);
  if (!(mean_auc_1 > 0.0) || !(mean_auc_2 > 0.0)) {
    throw DataError("transitions: mean curve area vanishes on a half");
  }
  const double mean_at_split =
      interpolate(dataset.axis, dataset.mean_series, split_time);
  if (!(mean_at_split > 0.0)) {
    throw DataError("transitions: mean intensity is zero at the split");
  }

  const std::size_t n = dataset.entity_count();
  out.first_results.resize(n);
  out.second_results.resize(n);
  out.first.resize(n);
  out.second.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& series = dataset.series[i];
    if (series.all_zero()) {
      out.first_results[i] = zero_result();
      out.second_results[i] = zero_result();
    } else {
      out.first_results[i] = compute_ati(region.curves[i], region.mean_curve,
                                         mean_auc_1, a, split_time, quad);
      out.second_results[i] = compute_ati(region.curves[i], region.mean_curve,
                                          mean_auc_2, split_time, b, quad);
    }

    const EntryTime entry =
        entry_time(series, dataset.mean_series, dataset.axis, entry_fraction);
    const double value_at_split =
        interpolate(dataset.axis, series.values, split_time);

    FeatureVector& f1 = out.first[i];
    f1.ati = out.first_results[i].ati;
    f1.entry = entry;
    f1.lai = value_at_split / mean_at_split * 100.0;
    f1.trajectory = latest_trajectory(out.first_results[i]);
    f1.low_fit = region.curves[i].low_fit;

    FeatureVector& f2 = out.second[i];
    f2.ati = out.second_results[i].ati;
    f2.entry = entry;
    f2.lai = latest_adoption_intensity(series, dataset.mean_series);
    f2.trajectory = latest_trajectory(out.second_results[i]);
    f2.low_fit = region.curves[i].low_fit;
  }
  return out;
}

std::vector<TransitionRecord> transition_records(const RegionDataset& dataset,
                                                 const SplitFeatures& split) {
  if (split.first.size() != dataset.entity_count()) {
    throw DataError("transitions: split features do not match dataset");
  }
  const RegionProfiles first = build_profiles(split.first);
  const RegionProfiles second = build_profiles(split.second);
  std::vector<TransitionRecord> records(dataset.entity_count());
  for (std::size_t i = 0; i < records.size(); ++i) {
    records[i].entity_id = dataset.series[i].entity_id;
    records[i].first = classify(first.profiles[i]).path;
    records[i].second = classify(second.profiles[i]).path;
    records[i].magnitude =
        path_order(records[i].second) - path_order(records[i].first);
  }
  return records;
}

TransitionMatrix transition_matrix(std::span<const TransitionRecord> records) {
  TransitionMatrix m;
  for (const auto& r : records) {
    ++m.counts[path_order(r.first)][path_order(r.second)];
    ++m.total;
  }
  if (m.total > 0) {
    for (int i = 0; i < 8; ++i) {
      for (int j = 0; j < 8; ++j) {
        m.percent[i][j] = 100.0 * m.counts[i][j] / m.total;
      }
    }
  }
  return m;
}

MagnitudeDistribution magnitude_distribution(
    std::span<const TransitionRecord> records) {
  MagnitudeDistribution d;
  for (const auto& r : records) {
    ++d.counts[r.magnitude + 7];
    ++d.total;
  }
  if (d.total > 0) {
    int up = 0, down = 0, flat = 0;
    for (const auto& r : records) {
      if (r.magnitude > 0) {
        ++up;
      } else if (r.magnitude < 0) {
        ++down;
      } else {
        ++flat;
      }
    }
    d.share_up = static_cast<double>(up) / d.total;
    d.share_down = static_cast<double>(down) / d.total;
    d.share_unchanged = static_cast<double>(flat) / d.total;
  }
  return d;
}

std::vector<PathMedianCurve> path_median_curves(
    const RegionDataset& dataset, std::span<const PathAssignment> assignments) {
  if (assignments.size() != dataset.entity_count()) {
    throw DataError("transitions: assignments do not match dataset");
  }
  std::vector<PathMedianCurve> out;
  for (int p = 0; p < 8; ++p) {
    const auto path = static_cast<AdoptionPath>(p);
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < assignments.size(); ++i) {
      if (assignments[i].path == path) members.push_back(i);
    }
    if (members.empty()) continue;
    PathMedianCurve curve;
    curve.path = path;
    curve.n_members = static_cast<int>(members.size());
    curve.values.resize(dataset.axis.size());
    std::vector<double> column(members.size());
    for (std::size_t t = 0; t < dataset.axis.size(); ++t) {
      for (std::size_t k = 0; k < members.size(); ++k) {
        column[k] = dataset.series[members[k]].values[t];
      }
      curve.values[t] = median_of(column);
    }
    out.push_back(std::move(curve));
  }
  return out;
}

}  // namespace adoptpath
