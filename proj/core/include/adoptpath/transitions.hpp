#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "adoptpath/ati.hpp"
#include "adoptpath/features.hpp"
#include "adoptpath/typology.hpp"

namespace adoptpath {

/// Features recomputed on the two halves of the timeline.  Curves are the
/// full-timeline fits restricted to each half (never refit); entry times
/// are a single historical event and stay identical in both halves.
struct SplitFeatures {
  double split_time = 0.0;
  std::vector<AtiResult> first_results, second_results;
  std::vector<FeatureVector> first, second;
};

SplitFeatures split_features(const RegionDataset& dataset,
                             const RegionAti& region, double split_time,
                             double entry_fraction,
                             const QuadratureOptions& quad = {});

/// One entity's movement between per-half paths.  Magnitude is the
/// difference of path positions in the weak-to-strong ordering, so it
/// ranges over [-7, +7] and 0 means no change.
struct TransitionRecord {
  std::string entity_id;
  AdoptionPath first = AdoptionPath::NonAdopting;
  AdoptionPath second = AdoptionPath::NonAdopting;
  int magnitude = 0;
};

/// Classifies both halves (tier statistics recomputed per half) and pairs
/// the assignments per entity.
std::vector<TransitionRecord> transition_records(const RegionDataset& dataset,
                                                 const SplitFeatures& split);

struct TransitionMatrix {
  std::array<std::array<int, 8>, 8> counts{};     ///< [from][to]
  std::array<std::array<double, 8>, 8> percent{};
  int total = 0;
};

TransitionMatrix transition_matrix(std::span<const TransitionRecord> records);

struct MagnitudeDistribution {
  std::array<int, 15> counts{};  ///< index m + 7 for magnitude m
  int total = 0;
  double share_up = 0.0;
  double share_down = 0.0;
  double share_unchanged = 0.0;
};

MagnitudeDistribution magnitude_distribution(
    std::span<const TransitionRecord> records);

/// Pointwise median of the observed series of all members of one path.
struct PathMedianCurve {
  AdoptionPath path = AdoptionPath::NonAdopting;
  int n_members = 0;
  std::vector<double> values;
};

/// Median curves per full-timeline path, in path order; empty paths are
/// omitted.
std::vector<PathMedianCurve> path_median_curves(
    const RegionDataset& dataset, std::span<const PathAssignment> assignments);

}  // namespace adoptpath
