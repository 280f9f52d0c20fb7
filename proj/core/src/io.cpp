#include "adoptpath/io.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include "adoptpath/errors.hpp"

namespace adoptpath {

namespace {

std::vector<std::string> split_line(const std::string& line, char delimiter) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, delimiter)) fields.push_back(field);
  if (!line.empty() && line.back() == delimiter) fields.emplace_back();
  return fields;
}

std::vector<std::vector<std::string>> read_table(std::istream& in,
                                                 const std::string& what,
                                                 std::size_t n_columns) {
  std::vector<std::vector<std::string>> rows;
  std::string line;
  bool header_skipped = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header_skipped) {
      header_skipped = true;
      continue;
    }
    auto fields = split_line(line, ',');
    if (fields.size() != n_columns) {
      throw DataError("io: " + what + ": expected " +
                      std::to_string(n_columns) + " columns, got " +
                      std::to_string(fields.size()));
    }
    rows.push_back(std::move(fields));
  }
  return rows;
}

int parse_int(const std::string& text) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw DataError("io: malformed integer '" + text + "'");
  }
  return v;
}

bool parse_bool(const std::string& text) {
  if (text == "0") return false;
  if (text == "1") return true;
  throw DataError("io: malformed boolean '" + text + "'");
}

std::string join_params(const std::vector<double>& params, int precision) {
  std::string out;
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (i) out += ';';
    out += format_real(params[i], precision);
  }
  return out;
}

std::vector<double> split_params(const std::string& packed) {
  std::vector<double> params;
  for (const auto& piece : split_line(packed, ';')) {
    params.push_back(parse_real(piece));
  }
  return params;
}

}  // namespace

std::string format_real(double value, int precision) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value,
                                 std::chars_format::general, precision);
  if (ec != std::errc()) throw DataError("io: failed to format number");
  return std::string(buf, ptr);
}

double parse_real(const std::string& text) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw DataError("io: malformed number '" + text + "'");
  }
  return v;
}

void write_fits_csv(std::ostream& out, std::span<const FitRow> rows,
                    int precision) {
  out << "entity_id,family,params,shift,scale,domain_begin,domain_end,"
         "r2,r2_adjusted,low_fit\n";
  for (const auto& row : rows) {
    const auto& fc = row.curve;
    out << row.entity_id << ',' << family_name(fc.curve.family) << ','
        << join_params(fc.curve.params, precision) << ','
        << format_real(fc.curve.shift, precision) << ','
        << format_real(fc.curve.scale, precision) << ','
        << format_real(fc.domain_begin, precision) << ','
        << format_real(fc.domain_end, precision) << ','
        << format_real(fc.r2, precision) << ','
        << format_real(fc.r2_adjusted, precision) << ','
        << (fc.low_fit ? '1' : '0') << '\n';
  }
}

std::vector<FitRow> read_fits_csv(std::istream& in) {
  std::vector<FitRow> rows;
  for (auto& fields : read_table(in, "fits", 10)) {
    FitRow row;
    row.entity_id = fields[0];
    FittedCurve& fc = row.curve;
    fc.curve.family = family_from_name(fields[1]);
    fc.curve.params = split_params(fields[2]);
    fc.curve.shift = parse_real(fields[3]);
    fc.curve.scale = parse_real(fields[4]);
    fc.domain_begin = parse_real(fields[5]);
    fc.domain_end = parse_real(fields[6]);
    fc.r2 = parse_real(fields[7]);
    fc.r2_adjusted = parse_real(fields[8]);
    fc.low_fit = parse_bool(fields[9]);
    const int expected = family_parameter_count(fc.curve.family);
    if (expected > 0 && fc.curve.parameter_count() != expected) {
      throw DataError("io: fits: wrong parameter count for family " +
                      std::string(family_name(fc.curve.family)));
    }
    if (fc.curve.params.empty()) {
      throw DataError("io: fits: empty parameter list");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError("io: fits: no rows");
  return rows;
}

const FittedCurve& find_fit(std::span<const FitRow> rows,
                            const std::string& entity_id) {
  for (const auto& row : rows) {
    if (row.entity_id == entity_id) return row.curve;
  }
  throw DataError("io: fits: missing entity '" + entity_id + "'");
}

void write_ati_csv(std::ostream& out, std::span<const AtiRow> rows,
                   int precision) {
  out << "entity_id,a_norm,ati,n_intersections,low_fit\n";
  for (const auto& row : rows) {
    out << row.entity_id << ',' << format_real(row.a_norm, precision) << ','
        << format_real(row.ati, precision) << ',' << row.n_intersections << ','
        << (row.low_fit ? '1' : '0') << '\n';
  }
}

std::vector<AtiRow> read_ati_csv(std::istream& in) {
  std::vector<AtiRow> rows;
  for (auto& fields : read_table(in, "ati", 5)) {
    AtiRow row;
    row.entity_id = fields[0];
    row.a_norm = parse_real(fields[1]);
    row.ati = parse_real(fields[2]);
    row.n_intersections = parse_int(fields[3]);
    row.low_fit = parse_bool(fields[4]);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError("io: ati: no rows");
  return rows;
}

void write_features_csv(std::ostream& out, std::span<const FeatureRow> rows,
                        int precision) {
  out << "entity_id,ati,entry_time,lai,trajectory,low_fit\n";
  for (const auto& row : rows) {
    out << row.entity_id << ',' << format_real(row.ati, precision) << ',';
    if (row.entry_time) out << format_real(*row.entry_time, precision);
    out << ',' << format_real(row.lai, precision) << ','
        << trajectory_name(row.trajectory) << ',' << (row.low_fit ? '1' : '0')
        << '\n';
  }
}

std::vector<FeatureRow> read_features_csv(std::istream& in) {
  std::vector<FeatureRow> rows;
  for (auto& fields : read_table(in, "features", 6)) {
    FeatureRow row;
    row.entity_id = fields[0];
    row.ati = parse_real(fields[1]);
    if (!fields[2].empty()) row.entry_time = parse_real(fields[2]);
    row.lai = parse_real(fields[3]);
    row.trajectory = trajectory_from_name(fields[4]);
    row.low_fit = parse_bool(fields[5]);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError("io: features: no rows");
  return rows;
}

void write_paths_csv(std::ostream& out, std::span<const PathRow> rows) {
  out << "entity_id,ati_tier,entry_tier,trajectory,lai_tier,path,rule_id\n";
  for (const auto& row : rows) {
    out << row.entity_id << ',' << level_name(row.profile.ati_tier) << ','
        << entry_level_name(row.profile.entry_tier) << ','
        << trajectory_name(row.profile.trajectory) << ','
        << level_name(row.profile.lai_tier) << ',' << path_name(row.path)
        << ',' << row.rule_id << '\n';
  }
}

std::vector<PathRow> read_paths_csv(std::istream& in) {
  std::vector<PathRow> rows;
  for (auto& fields : read_table(in, "paths", 7)) {
    PathRow row;
    row.entity_id = fields[0];
    row.profile.ati_tier = level_from_name(fields[1]);
    row.profile.entry_tier = entry_level_from_name(fields[2]);
    row.profile.trajectory = trajectory_from_name(fields[3]);
    row.profile.lai_tier = level_from_name(fields[4]);
    row.path = path_from_name(fields[5]);
    row.rule_id = fields[6];
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError("io: paths: no rows");
  return rows;
}

void write_path_frequencies_csv(std::ostream& out,
                                std::span<const PathRow> rows, int precision) {
  out << "path,count,share\n";
  const double total = static_cast<double>(rows.size());
  for (int p = 0; p < 8; ++p) {
    const auto path = static_cast<AdoptionPath>(p);
    int count = 0;
    for (const auto& row : rows) {
      if (row.path == path) ++count;
    }
    out << path_name(path) << ',' << count << ','
        << format_real(total > 0 ? count / total : 0.0, precision) << '\n';
  }
}

void write_threshold_scan_csv(std::ostream& out, const ThresholdScan& scan,
                              int precision) {
  out << "fraction,coverage,n_entries,sd,skewness,excess_kurtosis,"
         "passed_coverage,selected\n";
  for (const auto& c : scan.candidates) {
    out << format_real(c.fraction, precision) << ','
        << format_real(c.coverage, precision) << ',' << c.n_entries << ','
        << format_real(c.sd, precision) << ','
        << format_real(c.skewness, precision) << ','
        << format_real(c.excess_kurtosis, precision) << ','
        << (c.passed_coverage ? '1' : '0') << ','
        << (c.fraction == scan.selected_fraction ? '1' : '0') << '\n';
  }
}

void write_transitions_csv(std::ostream& out,
                           std::span<const TransitionRecord> records) {
  out << "entity_id,path_first_half,path_second_half,magnitude\n";
  for (const auto& r : records) {
    out << r.entity_id << ',' << path_name(r.first) << ',' << path_name(r.second)
        << ',' << r.magnitude << '\n';
  }
}

void write_matrix_csv(std::ostream& out, const TransitionMatrix& matrix,
                      int precision) {
  out << "from_index,to_index,from,to,count,percent\n";
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 8; ++j) {
      out << i << ',' << j << ',' << path_name(static_cast<AdoptionPath>(i))
          << ',' << path_name(static_cast<AdoptionPath>(j)) << ','
          << matrix.counts[i][j] << ','
          << format_real(matrix.percent[i][j], precision) << '\n';
    }
  }
}

void write_magnitudes_csv(std::ostream& out,
                          const MagnitudeDistribution& distribution,
                          int precision) {
  out << "magnitude,count\n";
  for (int m = -7; m <= 7; ++m) {
    out << m << ',' << distribution.counts[m + 7] << '\n';
  }
  out << "\nshare_up,share_down,share_unchanged\n"
      << format_real(distribution.share_up, precision) << ','
      << format_real(distribution.share_down, precision) << ','
      << format_real(distribution.share_unchanged, precision) << '\n';
}

void write_medians_csv(std::ostream& out, const TimeAxis& axis,
                       std::span<const PathMedianCurve> curves,
                       int precision) {
  out << "path,n_members,time,value\n";
  for (const auto& curve : curves) {
    for (std::size_t t = 0; t < curve.values.size(); ++t) {
      out << path_name(curve.path) << ',' << curve.n_members << ','
          << format_real(axis.points[t], precision) << ','
          << format_real(curve.values[t], precision) << '\n';
    }
  }
}

void write_stats_csv(std::ostream& out, std::span<const MomentRow> moments,
                     const std::string& comparison,
                     const WilcoxonResult& wilcoxon, int precision) {
  out << "metric,n,mean,median,sd,skewness,excess_kurtosis\n";
  for (const auto& row : moments) {
    const auto& s = row.summary;
    out << row.metric << ',' << s.n << ',' << format_real(s.mean, precision)
        << ',' << format_real(s.median, precision) << ','
        << format_real(s.sd, precision) << ','
        << format_real(s.skewness, precision) << ','
        << format_real(s.excess_kurtosis, precision) << '\n';
  }
  out << "\ncomparison,n_used,w,p_value,method\n";
  out << comparison << ',' << wilcoxon.n_used << ',';
  if (wilcoxon.degenerate) {
    out << ",,degenerate\n";
  } else {
    out << format_real(wilcoxon.w, precision) << ','
        << format_real(wilcoxon.p_value, precision) << ','
        << (wilcoxon.exact ? "exact" : "normal") << '\n';
  }
}

}  // namespace adoptpath
