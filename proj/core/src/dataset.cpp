#include "adoptpath/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>

#include "adoptpath/errors.hpp"

namespace adoptpath {

namespace {

constexpr const char* kMeanEntityId = "__regional_mean__";
constexpr double kDaysPerYear = 365.2425;

std::vector<std::string> split_fields(const std::string& line, char delimiter) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, delimiter)) fields.push_back(field);
  if (!line.empty() && line.back() == delimiter) fields.emplace_back();
  return fields;
}

bool parse_real(const std::string& text, double& out) {
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

// Days since 1970-01-01 for a proleptic Gregorian date.
long days_from_civil(long y, unsigned m, unsigned d) {
  y -= m <= 2;
  const long era = (y >= 0 ? y : y - 399) / 400;
  const auto yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<long>(doe) - 719468;
}

bool parse_iso_date(const std::string& text, double& out_days) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return false;
  long y = 0;
  unsigned m = 0, d = 0;
  auto parse_uint = [](const char* b, const char* e, auto& v) {
    auto [ptr, ec] = std::from_chars(b, e, v);
    return ec == std::errc() && ptr == e;
  };
  const char* s = text.data();
  if (!parse_uint(s, s + 4, y) || !parse_uint(s + 5, s + 7, m) ||
      !parse_uint(s + 8, s + 10, d)) {
    return false;
  }
  if (m < 1 || m > 12 || d < 1 || d > 31) return false;
  static const unsigned kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
  const unsigned cap = (m == 2 && leap) ? 29 : kDays[m - 1];
  if (d > cap) return false;
  out_days = static_cast<double>(days_from_civil(y, m, d));
  return true;
}

struct RawRow {
  std::string entity_id;
  std::string time_label;
  double time_key = 0;  // numeric value or days since epoch
  double value = 0;
};

}  // namespace

bool AdoptionSeries::all_zero() const {
  return std::all_of(values.begin(), values.end(),
                     [](double v) { return v == 0.0; });
}

const AdoptionSeries& RegionDataset::find(const std::string& entity_id) const {
  for (const auto& s : series) {
    if (s.entity_id == entity_id) return s;
  }
  throw DataError("dataset: unknown entity id '" + entity_id + "'");
}

double adoption_intensity(double pv_area, double built_area,
                          const std::string& entity_id) {
  if (!(built_area > 0.0)) {
    throw DataError("dataset: non-positive built-up area for entity '" +
                    entity_id + "'");
  }
  if (!(pv_area >= 0.0) || !std::isfinite(pv_area)) {
    throw DataError("dataset: invalid panel area for entity '" + entity_id + "'");
  }
  return pv_area * 1.0e6 / built_area;
}

RegionDataset make_region(TimeAxis axis, std::vector<AdoptionSeries> series) {
  if (axis.points.size() < 2) {
    throw DataError("dataset: time axis needs at least 2 points");
  }
  for (std::size_t i = 1; i < axis.points.size(); ++i) {
    if (!(axis.points[i] > axis.points[i - 1])) {
      throw DataError("dataset: time axis must be strictly increasing");
    }
  }
  if (series.empty()) throw DataError("dataset: no entities");

  std::sort(series.begin(), series.end(),
            [](const AdoptionSeries& a, const AdoptionSeries& b) {
              return a.entity_id < b.entity_id;
            });
  for (std::size_t i = 1; i < series.size(); ++i) {
    if (series[i].entity_id == series[i - 1].entity_id) {
      throw DataError("dataset: duplicate entity id '" + series[i].entity_id + "'");
    }
  }

  const std::size_t n_times = axis.points.size();
  for (const auto& s : series) {
    if (s.entity_id.empty()) throw DataError("dataset: empty entity id");
    if (s.entity_id == kMeanEntityId) {
      throw DataError(std::string("dataset: entity id '") + kMeanEntityId +
                      "' is reserved");
    }
    if (s.values.size() != n_times) {
      throw DataError("dataset: series length mismatch for entity '" +
                      s.entity_id + "'");
    }
    for (double v : s.values) {
      if (!std::isfinite(v) || v < 0.0) {
        throw DataError("dataset: negative or non-finite value for entity '" +
                        s.entity_id + "'");
      }
    }
  }

  RegionDataset ds;
  ds.axis = std::move(axis);
  ds.series = std::move(series);
  ds.mean_series.assign(n_times, 0.0);
  for (const auto& s : ds.series) {
    for (std::size_t i = 0; i < n_times; ++i) ds.mean_series[i] += s.values[i];
  }
  const auto n = static_cast<double>(ds.series.size());
  for (double& m : ds.mean_series) m /= n;
  return ds;
}

RegionDataset load_region(std::istream& in, char delimiter) {
  std::string line;
  std::vector<RawRow> rows;
  bool numeric_times = false;
  bool date_times = false;
  bool four_columns = false;
  bool saw_data = false;
  std::map<std::string, double> built_by_entity;
  std::size_t line_no = 0;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_fields(line, delimiter);
    if (fields.size() != 3 && fields.size() != 4) {
      throw DataError("dataset: line " + std::to_string(line_no) +
                      ": expected 3 or 4 columns, got " +
                      std::to_string(fields.size()));
    }

    double time_num = 0, time_days = 0;
    const bool is_num = parse_real(fields[1], time_num);
    const bool is_date = !is_num && parse_iso_date(fields[1], time_days);
    if (!saw_data) {
      if (!is_num && !is_date) continue;  // header line
      numeric_times = is_num;
      date_times = is_date;
      four_columns = fields.size() == 4;
      saw_data = true;
    } else {
      if ((numeric_times && !is_num) || (date_times && !is_date)) {
        throw DataError("dataset: line " + std::to_string(line_no) +
                        ": mixed time formats");
      }
      if ((fields.size() == 4) != four_columns) {
        throw DataError("dataset: line " + std::to_string(line_no) +
                        ": inconsistent column count");
      }
    }

    RawRow row;
    row.entity_id = fields[0];
    row.time_label = fields[1];
    row.time_key = numeric_times ? time_num : time_days;
    if (row.entity_id.empty()) {
      throw DataError("dataset: line " + std::to_string(line_no) +
                      ": empty entity id");
    }
    if (four_columns) {
      double pv = 0, built = 0;
      if (!parse_real(fields[2], pv) || !parse_real(fields[3], built)) {
        throw DataError("dataset: line " + std::to_string(line_no) +
                        ": malformed areas");
      }
      auto [it, inserted] = built_by_entity.emplace(row.entity_id, built);
      if (!inserted && it->second != built) {
        throw DataError("dataset: built-up area varies for entity '" +
                        row.entity_id + "'");
      }
      row.value = adoption_intensity(pv, built, row.entity_id);
    } else {
      if (!parse_real(fields[2], row.value)) {
        throw DataError("dataset: line " + std::to_string(line_no) +
                        ": malformed value");
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError("dataset: no entities");

  // Build the shared time grid from all distinct time keys.
  std::vector<std::pair<double, std::string>> grid;
  for (const auto& r : rows) grid.emplace_back(r.time_key, r.time_label);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end(),
                         [](const auto& a, const auto& b) {
                           return a.first == b.first;
                         }),
             grid.end());

  TimeAxis axis;
  const double t0 = grid.front().first;
  for (const auto& [key, label] : grid) {
    const double rel = key - t0;
    axis.points.push_back(date_times ? rel / kDaysPerYear : rel);
    axis.labels.push_back(label);
  }

  std::map<std::string, std::vector<double>> panel;
  std::map<std::string, std::vector<bool>> seen;
  auto time_index = [&grid](double key) {
    auto it = std::lower_bound(
        grid.begin(), grid.end(), key,
        [](const auto& a, double b) { return a.first < b; });
    return static_cast<std::size_t>(it - grid.begin());
  };
  for (const auto& r : rows) {
    auto& vals = panel[r.entity_id];
    auto& mask = seen[r.entity_id];
    if (vals.empty()) {
      vals.assign(grid.size(), 0.0);
      mask.assign(grid.size(), false);
    }
    const std::size_t idx = time_index(r.time_key);
    if (mask[idx]) {
      throw DataError("dataset: duplicate observation for entity '" +
                      r.entity_id + "' at time " + r.time_label);
    }
    mask[idx] = true;
    vals[idx] = r.value;
  }
  for (const auto& [id, mask] : seen) {
    for (std::size_t i = 0; i < mask.size(); ++i) {
      if (!mask[i]) {
        throw DataError("dataset: entity '" + id + "' missing time " +
                        axis.labels[i]);
      }
    }
  }

  std::vector<AdoptionSeries> series;
  series.reserve(panel.size());
  for (auto& [id, vals] : panel) {
    series.push_back(AdoptionSeries{id, std::move(vals)});
  }
  return make_region(std::move(axis), std::move(series));
}

RegionDataset load_region_file(const std::string& path, char delimiter) {
  std::ifstream in(path);
  if (!in) throw DataError("dataset: cannot open '" + path + "'");
  return load_region(in, delimiter);
}

}  // namespace adoptpath
