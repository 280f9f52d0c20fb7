#pragma once

#include <string>
#include <vector>

#include "adoptpath/ati.hpp"
#include "adoptpath/dataset.hpp"
#include "adoptpath/features.hpp"
#include "adoptpath/fit.hpp"
#include "adoptpath/io.hpp"
#include "adoptpath/stats.hpp"
#include "adoptpath/transitions.hpp"
#include "adoptpath/typology.hpp"

namespace adoptpath {

/// Configuration shared by the monolithic run and the per-stage commands.
/// Outputs depend only on these values and the input bytes; reruns are
/// byte-identical.
struct RunConfig {
  std::string input_path;
  std::string output_dir = ".";
  char delimiter = ',';

  bool threshold_auto = true;       ///< scan candidate fractions
  double threshold_fraction = 0.2;  ///< used when threshold_auto is false

  double r2_min = 0.9;
  FitOptions::Selection selection = FitOptions::Selection::AdjustedR2;

  bool split_mid = true;    ///< split the timeline at its midpoint
  double split_time = 0.0;  ///< used when split_mid is false

  double quad_rel_tol = 1e-10;
  int precision = 17;  ///< significant digits in outputs
  int threads = 1;     ///< fitting parallelism; 0 = hardware concurrency

  FitOptions fit_options() const;
  QuadratureOptions quadrature() const;
  double resolve_split(const TimeAxis& axis) const;
  void validate() const;
};

/// Everything the full pipeline computes, in memory.
struct PipelineResult {
  RegionDataset dataset;
  RegionAti region;
  ThresholdScan scan;  ///< empty candidate list when the fraction was fixed
  double threshold_fraction = 0.0;
  std::vector<FeatureVector> features;
  RegionProfiles profiles;
  std::vector<PathAssignment> paths;
  SplitFeatures split;
  std::vector<TransitionRecord> transitions;
  TransitionMatrix matrix;
  MagnitudeDistribution magnitudes;
  std::vector<PathMedianCurve> medians;
  std::vector<MomentRow> moment_rows;
  WilcoxonResult wilcoxon;
};

/// Number of tier combinations that pass the feasibility rules (out of
/// 4 * 4 * 4 * 4 raw combinations).
int count_feasible_profiles();

PipelineResult run_pipeline(const RunConfig& config);

/// Monolithic run: compute everything and write every output table plus
/// manifest.json into config.output_dir.
void run_all(const RunConfig& config);

/// Stage commands.  Each reads its prerequisites from config.output_dir
/// (missing prerequisite files raise ConfigError), recomputes its slice,
/// and writes its own outputs.  Running the stages in order reproduces
/// run_all byte for byte.
void run_stage_fit(const RunConfig& config);
void run_stage_ati(const RunConfig& config);
void run_stage_features(const RunConfig& config);
/// `override_threshold`: recompute entry times at config.threshold_fraction
/// instead of taking them from features.csv.
void run_stage_classify(const RunConfig& config, bool override_threshold);
void run_stage_transitions(const RunConfig& config);
void run_stage_stats(const RunConfig& config);

}  // namespace adoptpath
