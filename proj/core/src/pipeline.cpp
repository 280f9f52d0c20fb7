#include "adoptpath/pipeline.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "adoptpath/errors.hpp"
#include "adoptpath/parallel.hpp"

namespace adoptpath {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

constexpr const char* kVersion = "1.0.0";
constexpr const char* kWilcoxonComparison = "ati_vs_lai";

fs::path out_file(const RunConfig& cfg, const char* name) {
  return fs::path(cfg.output_dir) / name;
}

void write_text(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("pipeline: cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw DataError("pipeline: failed writing '" + path.string() + "'");
}

RegionDataset load_input(const RunConfig& cfg) {
  if (cfg.input_path.empty()) {
    throw ConfigError("pipeline: input path required");
  }
  return load_region_file(cfg.input_path, cfg.delimiter);
}

std::ifstream open_stage_file(const RunConfig& cfg, const char* name) {
  const fs::path path = out_file(cfg, name);
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("pipeline: missing '" + path.string() +
                      "'; run the earlier stages first");
  }
  return in;
}

// ---- manifest -------------------------------------------------------------

ordered_json load_manifest(const RunConfig& cfg) {
  std::ifstream in(out_file(cfg, "manifest.json"));
  if (!in) return ordered_json::object();
  try {
    return ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("pipeline: corrupt manifest.json: ") + e.what());
  }
}

void save_manifest(const RunConfig& cfg, const ordered_json& doc) {
  // Canonical section order keeps staged runs byte-identical to run_all.
  static const char* kOrder[] = {"tool",     "version", "config",
                                 "dataset",  "fit",     "ati",
                                 "features", "classify", "transitions"};
  ordered_json out = ordered_json::object();
  for (const char* key : kOrder) {
    if (doc.contains(key)) out[key] = doc.at(key);
  }
  write_text(out_file(cfg, "manifest.json"), out.dump(2) + "\n");
}

ordered_json config_json(const RunConfig& cfg) {
  ordered_json j = ordered_json::object();
  j["input"] = cfg.input_path;
  j["delimiter"] = std::string(1, cfg.delimiter);
  if (cfg.threshold_auto) {
    j["threshold"] = "auto";
  } else {
    j["threshold"] = cfg.threshold_fraction;
  }
  j["r2_min"] = cfg.r2_min;
  j["selection"] = cfg.selection == FitOptions::Selection::AdjustedR2
                       ? "adjusted"
                       : "plain";
  if (cfg.split_mid) {
    j["split"] = "mid";
  } else {
    j["split"] = cfg.split_time;
  }
  j["quad_rel_tol"] = cfg.quad_rel_tol;
  j["precision"] = cfg.precision;
  return j;
}

ordered_json dataset_json(const RegionDataset& ds) {
  ordered_json j = ordered_json::object();
  j["entities"] = ds.entity_count();
  j["time_points"] = ds.axis.size();
  j["t_first"] = ds.axis.front();
  j["t_last"] = ds.axis.back();
  return j;
}

ordered_json fit_json(const RegionDataset& ds, const FittedCurve& mean_curve,
                      std::span<const FittedCurve> curves) {
  ordered_json j = ordered_json::object();
  j["mean_family"] = family_name(mean_curve.curve.family);
  j["mean_low_fit"] = mean_curve.low_fit;
  ordered_json families = ordered_json::object();
  for (std::size_t i = 0; i < curves.size(); ++i) {
    families[ds.series[i].entity_id] = family_name(curves[i].curve.family);
  }
  j["families"] = families;
  return j;
}

// ---- row assembly ---------------------------------------------------------

std::vector<FitRow> to_fit_rows(const RegionDataset& ds,
                                const FittedCurve& mean_curve,
                                std::span<const FittedCurve> curves) {
  std::vector<FitRow> rows;
  rows.reserve(curves.size() + 1);
  rows.push_back({kMeanCurveId, mean_curve});
  for (std::size_t i = 0; i < curves.size(); ++i) {
    rows.push_back({ds.series[i].entity_id, curves[i]});
  }
  return rows;
}

std::vector<AtiRow> to_ati_rows(const RegionDataset& ds,
                                std::span<const FittedCurve> curves,
                                std::span<const AtiResult> results) {
  std::vector<AtiRow> rows(results.size());
  for (std::size_t i = 0; i < results.size(); ++i) {
    rows[i].entity_id = ds.series[i].entity_id;
    rows[i].a_norm = results[i].a_norm;
    rows[i].ati = results[i].ati;
    rows[i].n_intersections = static_cast<int>(results[i].intersections.size());
    rows[i].low_fit = curves[i].low_fit;
  }
  return rows;
}

std::vector<FeatureRow> to_feature_rows(const RegionDataset& ds,
                                        std::span<const FeatureVector> features) {
  std::vector<FeatureRow> rows(features.size());
  for (std::size_t i = 0; i < features.size(); ++i) {
    rows[i].entity_id = ds.series[i].entity_id;
    rows[i].ati = features[i].ati;
    rows[i].entry_time = features[i].entry.value;
    rows[i].lai = features[i].lai;
    rows[i].trajectory = features[i].trajectory;
    rows[i].low_fit = features[i].low_fit;
  }
  return rows;
}

std::vector<PathRow> to_path_rows(const RegionDataset& ds,
                                  const RegionProfiles& profiles,
                                  std::span<const PathAssignment> paths) {
  std::vector<PathRow> rows(paths.size());
  for (std::size_t i = 0; i < paths.size(); ++i) {
    rows[i].entity_id = ds.series[i].entity_id;
    rows[i].profile = profiles.profiles[i];
    rows[i].path = paths[i].path;
    rows[i].rule_id = paths[i].rule_id;
  }
  return rows;
}

std::vector<MomentRow> stats_moment_rows(std::span<const AtiRow> ati,
                                         std::span<const FeatureRow> features) {
  std::vector<double> ati_values, lai_values, entries;
  for (const auto& r : ati) ati_values.push_back(r.ati);
  for (const auto& r : features) {
    lai_values.push_back(r.lai);
    if (r.entry_time) entries.push_back(*r.entry_time);
  }
  std::vector<MomentRow> rows;
  rows.push_back({"ati", moments(ati_values)});
  rows.push_back({"lai", moments(lai_values)});
  if (!entries.empty()) rows.push_back({"entry_time", moments(entries)});
  return rows;
}

WilcoxonResult stats_wilcoxon(std::span<const AtiRow> ati,
                              std::span<const FeatureRow> features) {
  std::vector<double> a, b;
  for (const auto& r : ati) a.push_back(r.ati);
  for (const auto& r : features) b.push_back(r.lai);
  return wilcoxon_signed_rank(a, b);
}

template <typename WriteFn>
std::string render(WriteFn&& fn) {
  std::ostringstream out;
  fn(out);
  return out.str();
}

FeatureVector to_feature_vector(const FeatureRow& row, double fraction) {
  FeatureVector fv;
  fv.ati = row.ati;
  fv.entry.value = row.entry_time;
  fv.entry.threshold_fraction = fraction;
  fv.lai = row.lai;
  fv.trajectory = row.trajectory;
  fv.low_fit = row.low_fit;
  return fv;
}

}  // namespace

// ---- RunConfig ------------------------------------------------------------

FitOptions RunConfig::fit_options() const {
  FitOptions opts;
  opts.r2_admission = r2_min;
  opts.selection = selection;
  return opts;
}

QuadratureOptions RunConfig::quadrature() const { return {quad_rel_tol}; }

double RunConfig::resolve_split(const TimeAxis& axis) const {
  return split_mid ? 0.5 * (axis.front() + axis.back()) : split_time;
}

void RunConfig::validate() const {
  if (!threshold_auto &&
      (!(threshold_fraction > 0.0) || !(threshold_fraction < 1.0))) {
    throw ConfigError("pipeline: threshold fraction must lie in (0, 1)");
  }
  if (!(r2_min >= 0.0) || !(r2_min < 1.0)) {
    throw ConfigError("pipeline: r2_min must lie in [0, 1)");
  }
  if (!(quad_rel_tol > 0.0) || !(quad_rel_tol < 1.0)) {
    throw ConfigError("pipeline: quad_rel_tol must lie in (0, 1)");
  }
  if (!split_mid && !std::isfinite(split_time)) {
    throw ConfigError("pipeline: split time must be finite");
  }
  if (precision < 1 || precision > 17) {
    throw ConfigError("pipeline: precision must lie in [1, 17]");
  }
  if (threads < 0) {
    throw ConfigError("pipeline: threads must be non-negative");
  }
}

// ---- whole pipeline -------------------------------------------------------

int count_feasible_profiles() {
  int count = 0;
  for (int a = 0; a < 4; ++a) {
    for (int e = 0; e < 4; ++e) {
      for (int t = 0; t < 4; ++t) {
        for (int l = 0; l < 4; ++l) {
          const AdoptionProfile p{
              static_cast<Level>(a), static_cast<EntryLevel>(e),
              static_cast<Trajectory>(t), static_cast<Level>(l)};
          if (is_feasible(p)) ++count;
        }
      }
    }
  }
  return count;
}

PipelineResult run_pipeline(const RunConfig& config) {
  config.validate();
  PipelineResult res;
  res.dataset = load_input(config);
  res.region = compute_region_ati(res.dataset, config.fit_options(),
                                  config.quadrature(), config.threads);

  if (config.threshold_auto) {
    res.scan = select_entry_threshold(res.dataset);
    res.threshold_fraction = res.scan.selected_fraction;
  } else {
    res.threshold_fraction = config.threshold_fraction;
  }

  res.features =
      compute_features(res.dataset, res.region, res.threshold_fraction);
  res.profiles = build_profiles(res.features);
  res.paths.reserve(res.features.size());
  for (const auto& profile : res.profiles.profiles) {
    res.paths.push_back(classify(profile));
  }

  const double split_t = config.resolve_split(res.dataset.axis);
  res.split = split_features(res.dataset, res.region, split_t,
                             res.threshold_fraction, config.quadrature());
  res.transitions = transition_records(res.dataset, res.split);
  res.matrix = transition_matrix(res.transitions);
  res.magnitudes = magnitude_distribution(res.transitions);
  res.medians = path_median_curves(res.dataset, res.paths);

  const auto ati_rows =
      to_ati_rows(res.dataset, res.region.curves, res.region.results);
  const auto feature_rows = to_feature_rows(res.dataset, res.features);
  res.moment_rows = stats_moment_rows(ati_rows, feature_rows);
  res.wilcoxon = stats_wilcoxon(ati_rows, feature_rows);
  return res;
}

void run_all(const RunConfig& config) {
  const PipelineResult res = run_pipeline(config);
  const int p = config.precision;
  const auto& ds = res.dataset;

  const auto fit_rows = to_fit_rows(ds, res.region.mean_curve, res.region.curves);
  write_text(out_file(config, "fits.csv"),
             render([&](std::ostream& o) { write_fits_csv(o, fit_rows, p); }));

  const auto ati_rows = to_ati_rows(ds, res.region.curves, res.region.results);
  write_text(out_file(config, "ati.csv"),
             render([&](std::ostream& o) { write_ati_csv(o, ati_rows, p); }));

  if (config.threshold_auto) {
    write_text(out_file(config, "threshold_scan.csv"),
               render([&](std::ostream& o) {
                 write_threshold_scan_csv(o, res.scan, p);
               }));
  }
  const auto feature_rows = to_feature_rows(ds, res.features);
  write_text(out_file(config, "features.csv"), render([&](std::ostream& o) {
               write_features_csv(o, feature_rows, p);
             }));

  const auto path_rows = to_path_rows(ds, res.profiles, res.paths);
  write_text(out_file(config, "paths.csv"), render([&](std::ostream& o) {
               write_paths_csv(o, path_rows);
             }));
  write_text(out_file(config, "path_frequencies.csv"),
             render([&](std::ostream& o) {
               write_path_frequencies_csv(o, path_rows, p);
             }));

  write_text(out_file(config, "transitions.csv"), render([&](std::ostream& o) {
               write_transitions_csv(o, res.transitions);
             }));
  write_text(out_file(config, "matrix.csv"), render([&](std::ostream& o) {
               write_matrix_csv(o, res.matrix, p);
             }));
  write_text(out_file(config, "magnitudes.csv"), render([&](std::ostream& o) {
               write_magnitudes_csv(o, res.magnitudes, p);
             }));
  write_text(out_file(config, "medians.csv"), render([&](std::ostream& o) {
               write_medians_csv(o, ds.axis, res.medians, p);
             }));

  write_text(out_file(config, "stats.csv"), render([&](std::ostream& o) {
               write_stats_csv(o, res.moment_rows, kWilcoxonComparison,
                               res.wilcoxon, p);
             }));

  ordered_json doc = ordered_json::object();
  doc["tool"] = "adoptpath";
  doc["version"] = kVersion;
  doc["config"] = config_json(config);
  doc["dataset"] = dataset_json(ds);
  doc["fit"] = fit_json(ds, res.region.mean_curve, res.region.curves);
  doc["ati"] = {{"mean_auc", res.region.mean_auc}};
  doc["features"] = {{"threshold_fraction", res.threshold_fraction},
                     {"threshold_forced", res.scan.forced}};
  doc["classify"] = {{"feasible_profiles", count_feasible_profiles()},
                     {"threshold_override", nullptr}};
  doc["transitions"] = {{"split_time", res.split.split_time}};
  save_manifest(config, doc);
}

// ---- stage commands -------------------------------------------------------

void run_stage_fit(const RunConfig& config) {
  config.validate();
  const RegionDataset ds = load_input(config);
  const RegionCurves fitted =
      fit_region_curves(ds, config.fit_options(), config.threads);

  const auto rows = to_fit_rows(ds, fitted.mean_curve, fitted.curves);
  write_text(out_file(config, "fits.csv"), render([&](std::ostream& o) {
               write_fits_csv(o, rows, config.precision);
             }));

  ordered_json doc = load_manifest(config);
  doc["tool"] = "adoptpath";
  doc["version"] = kVersion;
  doc["config"] = config_json(config);
  doc["dataset"] = dataset_json(ds);
  doc["fit"] = fit_json(ds, fitted.mean_curve, fitted.curves);
  save_manifest(config, doc);
}

namespace {

// Curves for the dataset's entities, parsed back from fits.csv.
RegionAti load_region_fits(const RunConfig& cfg, const RegionDataset& ds) {
  auto in = open_stage_file(cfg, "fits.csv");
  const auto rows = read_fits_csv(in);
  RegionAti region;
  region.mean_curve = find_fit(rows, kMeanCurveId);
  region.curves.reserve(ds.entity_count());
  for (const auto& s : ds.series) {
    region.curves.push_back(find_fit(rows, s.entity_id));
  }
  region.mean_auc = curve_auc(region.mean_curve, cfg.quadrature());
  if (!(region.mean_auc > 0.0)) {
    throw DataError("pipeline: regional mean curve has non-positive area");
  }
  return region;
}

std::vector<AtiResult> recompute_results(const RunConfig& cfg,
                                         const RegionDataset& ds,
                                         const RegionAti& region) {
  std::vector<AtiResult> results(ds.entity_count());
  parallel_for(ds.entity_count(), cfg.threads, [&](std::size_t i) {
    results[i] = compute_entity_ati(ds.series[i], region.curves[i],
                                    region.mean_curve, region.mean_auc,
                                    cfg.quadrature());
  });
  return results;
}

}  // namespace

void run_stage_ati(const RunConfig& config) {
  config.validate();
  const RegionDataset ds = load_input(config);
  const RegionAti region = load_region_fits(config, ds);
  const auto results = recompute_results(config, ds, region);

  const auto rows = to_ati_rows(ds, region.curves, results);
  write_text(out_file(config, "ati.csv"), render([&](std::ostream& o) {
               write_ati_csv(o, rows, config.precision);
             }));

  ordered_json doc = load_manifest(config);
  doc["ati"] = {{"mean_auc", region.mean_auc}};
  save_manifest(config, doc);
}

void run_stage_features(const RunConfig& config) {
  config.validate();
  const RegionDataset ds = load_input(config);
  const RegionAti region = load_region_fits(config, ds);
  auto ati_in = open_stage_file(config, "ati.csv");
  const auto ati_rows = read_ati_csv(ati_in);
  if (ati_rows.size() != ds.entity_count()) {
    throw DataError("pipeline: ati.csv does not match the input dataset");
  }

  ThresholdScan scan;
  double fraction = config.threshold_fraction;
  if (config.threshold_auto) {
    scan = select_entry_threshold(ds);
    fraction = scan.selected_fraction;
    write_text(out_file(config, "threshold_scan.csv"),
               render([&](std::ostream& o) {
                 write_threshold_scan_csv(o, scan, config.precision);
               }));
  }

  const auto results = recompute_results(config, ds, region);
  std::vector<FeatureRow> rows(ds.entity_count());
  for (std::size_t i = 0; i < ds.entity_count(); ++i) {
    rows[i].entity_id = ds.series[i].entity_id;
    rows[i].ati = ati_rows[i].ati;
    const EntryTime entry =
        entry_time(ds.series[i], ds.mean_series, ds.axis, fraction);
    rows[i].entry_time = entry.value;
    rows[i].lai = latest_adoption_intensity(ds.series[i], ds.mean_series);
    rows[i].trajectory = latest_trajectory(results[i]);
    rows[i].low_fit = region.curves[i].low_fit;
  }
  write_text(out_file(config, "features.csv"), render([&](std::ostream& o) {
               write_features_csv(o, rows, config.precision);
             }));

  ordered_json doc = load_manifest(config);
  doc["features"] = {{"threshold_fraction", fraction},
                     {"threshold_forced", scan.forced}};
  save_manifest(config, doc);
}

void run_stage_classify(const RunConfig& config, bool override_threshold) {
  config.validate();
  auto features_in = open_stage_file(config, "features.csv");
  auto feature_rows = read_features_csv(features_in);

  double fraction = config.threshold_fraction;
  if (override_threshold) {
    if (config.threshold_auto) {
      throw ConfigError(
          "pipeline: classify override needs an explicit threshold fraction");
    }
    const RegionDataset ds = load_input(config);
    if (feature_rows.size() != ds.entity_count()) {
      throw DataError("pipeline: features.csv does not match the input dataset");
    }
    for (std::size_t i = 0; i < feature_rows.size(); ++i) {
      const auto& series = ds.find(feature_rows[i].entity_id);
      feature_rows[i].entry_time =
          entry_time(series, ds.mean_series, ds.axis, fraction).value;
    }
  }

  std::vector<FeatureVector> features;
  features.reserve(feature_rows.size());
  for (const auto& row : feature_rows) {
    features.push_back(to_feature_vector(row, fraction));
  }
  const RegionProfiles profiles = build_profiles(features);
  std::vector<PathRow> rows(feature_rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const PathAssignment assignment = classify(profiles.profiles[i]);
    rows[i].entity_id = feature_rows[i].entity_id;
    rows[i].profile = profiles.profiles[i];
    rows[i].path = assignment.path;
    rows[i].rule_id = assignment.rule_id;
  }
  write_text(out_file(config, "paths.csv"), render([&](std::ostream& o) {
               write_paths_csv(o, rows);
             }));
  write_text(out_file(config, "path_frequencies.csv"),
             render([&](std::ostream& o) {
               write_path_frequencies_csv(o, rows, config.precision);
             }));

  ordered_json doc = load_manifest(config);
  doc["classify"] = {{"feasible_profiles", count_feasible_profiles()},
                     {"threshold_override",
                      override_threshold ? ordered_json(fraction)
                                         : ordered_json(nullptr)}};
  save_manifest(config, doc);
}

void run_stage_transitions(const RunConfig& config) {
  config.validate();
  const RegionDataset ds = load_input(config);
  const RegionAti region = load_region_fits(config, ds);
  auto paths_in = open_stage_file(config, "paths.csv");
  const auto path_rows = read_paths_csv(paths_in);
  if (path_rows.size() != ds.entity_count()) {
    throw DataError("pipeline: paths.csv does not match the input dataset");
  }

  const ordered_json doc_in = load_manifest(config);
  if (!doc_in.contains("features") ||
      !doc_in["features"].contains("threshold_fraction")) {
    throw ConfigError(
        "pipeline: manifest.json lacks the selected threshold; run features "
        "first");
  }
  const double fraction = doc_in["features"]["threshold_fraction"].get<double>();

  const double split_t = config.resolve_split(ds.axis);
  const SplitFeatures split =
      split_features(ds, region, split_t, fraction, config.quadrature());
  const auto records = transition_records(ds, split);
  const TransitionMatrix matrix = transition_matrix(records);
  const MagnitudeDistribution magnitudes = magnitude_distribution(records);

  std::vector<PathAssignment> assignments(path_rows.size());
  for (std::size_t i = 0; i < path_rows.size(); ++i) {
    if (path_rows[i].entity_id != ds.series[i].entity_id) {
      throw DataError("pipeline: paths.csv entity order does not match input");
    }
    assignments[i] = {path_rows[i].path, path_rows[i].rule_id};
  }
  const auto medians = path_median_curves(ds, assignments);

  const int p = config.precision;
  write_text(out_file(config, "transitions.csv"), render([&](std::ostream& o) {
               write_transitions_csv(o, records);
             }));
  write_text(out_file(config, "matrix.csv"), render([&](std::ostream& o) {
               write_matrix_csv(o, matrix, p);
             }));
  write_text(out_file(config, "magnitudes.csv"), render([&](std::ostream& o) {
               write_magnitudes_csv(o, magnitudes, p);
             }));
  write_text(out_file(config, "medians.csv"), render([&](std::ostream& o) {
               write_medians_csv(o, ds.axis, medians, p);
             }));

  ordered_json doc = doc_in;
  doc["transitions"] = {{"split_time", split.split_time}};
  save_manifest(config, doc);
}

void run_stage_stats(const RunConfig& config) {
  config.validate();
  auto ati_in = open_stage_file(config, "ati.csv");
  const auto ati_rows = read_ati_csv(ati_in);
  auto features_in = open_stage_file(config, "features.csv");
  const auto feature_rows = read_features_csv(features_in);
  if (ati_rows.size() != feature_rows.size()) {
    throw DataError("pipeline: ati.csv and features.csv differ in length");
  }

  const auto moment_rows = stats_moment_rows(ati_rows, feature_rows);
  const WilcoxonResult wilcoxon = stats_wilcoxon(ati_rows, feature_rows);
  write_text(out_file(config, "stats.csv"), render([&](std::ostream& o) {
               write_stats_csv(o, moment_rows, kWilcoxonComparison, wilcoxon,
                               config.precision);
             }));
}

}  // namespace adoptpath
