#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace adoptpath {

/// Shared observation grid for every series in a region.  Points are
/// fractional years relative to the first observation, so points.front()
/// is always 0 and the sequence is strictly increasing.
struct TimeAxis {
  std::vector<double> points;
  std::vector<std::string> labels;  ///< original time strings (dates or numbers)

  double front() const { return points.front(); }
  double back() const { return points.back(); }
  double span() const { return points.back() - points.front(); }
  std::size_t size() const { return points.size(); }
};

/// One entity's cumulative adoption intensity sampled on the region axis.
/// Values are non-negative and non-decreasing checks are not enforced here;
/// only finiteness and non-negativity are (observed intensities may dip).
struct AdoptionSeries {
  std::string entity_id;
  std::vector<double> values;

  bool all_zero() const;
};

/// A region panel: the axis, one series per entity (sorted by id), and the
/// pointwise mean series over all entities.
struct RegionDataset {
  TimeAxis axis;
  std::vector<AdoptionSeries> series;
  std::vector<double> mean_series;

  std::size_t entity_count() const { return series.size(); }
  const AdoptionSeries& find(const std::string& entity_id) const;
};

/// Adoption intensity in m^2 of panel area per km^2 of built-up area.
/// Raises DataError when built_area is not strictly positive.
double adoption_intensity(double pv_area, double built_area,
                          const std::string& entity_id);

/// Assembles a dataset from in-memory series: sorts by entity id, validates
/// invariants, and computes the mean series.  The axis must be strictly
/// increasing and every series must match its length.
RegionDataset make_region(TimeAxis axis, std::vector<AdoptionSeries> series);

/// Parses a long-format CSV panel.  Columns: entity_id,time,value or
/// entity_id,time,pv_area,built_area (intensities then derived per row).
/// Times are either ISO-8601 dates (YYYY-MM-DD) or plain reals, uniformly;
/// every entity must cover the full time grid exactly once.
RegionDataset load_region(std::istream& in, char delimiter = ',');
RegionDataset load_region_file(const std::string& path, char delimiter = ',');

}  // namespace adoptpath
