#pragma once

#include <span>
#include <string>
#include <vector>

#include "adoptpath/features.hpp"

namespace adoptpath {

/// Magnitude tier for the index and for latest intensity.  Naught marks
/// exact zeros; the rest split around the populated mean by +-0.44 SD
/// (the band that holds the central ~34% of a normal distribution).
enum class Level { Naught, Low, Medium, High };

/// Timing tier for entry times; Null marks entities that never reached
/// the threshold.
enum class EntryLevel { Null, Early, Middle, Late };

const char* level_name(Level level);
Level level_from_name(const std::string& name);
const char* entry_level_name(EntryLevel level);
EntryLevel entry_level_from_name(const std::string& name);

/// Mean/SD over the populated (non-zero, non-null) values behind a tier
/// assignment.
struct TierStats {
  double mean = 0.0;
  double sd = 0.0;
  int n_used = 0;
};

/// Tiers for a value set: entries flagged in `excluded` map to Naught, the
/// rest compare against mean +- 0.44 SD of the non-excluded values (all
/// Medium when fewer than 2 values remain).
std::vector<Level> assign_tiers(std::span<const double> values,
                                const std::vector<bool>& excluded,
                                TierStats* stats = nullptr);
/// Same banding for entry times; excluded entries map to Null.
std::vector<EntryLevel> assign_entry_tiers(std::span<const double> values,
                                           const std::vector<bool>& excluded,
                                           TierStats* stats = nullptr);

/// Discrete per-entity profile.  Construction keeps the four coordinates
/// consistent: a zero index forces (Naught, Null, Null, Naught), while a
/// positive index never carries Null/Naught coordinates (a never-reached
/// entry counts as Late, a zero latest intensity as Low).
struct AdoptionProfile {
  Level ati_tier = Level::Naught;
  EntryLevel entry_tier = EntryLevel::Null;
  Trajectory trajectory = Trajectory::Null;
  Level lai_tier = Level::Naught;

  bool operator==(const AdoptionProfile&) const = default;
};

/// The eight adoption paths, ordered from weakest to strongest adoption
/// so transition magnitudes are differences of enum positions.
enum class AdoptionPath {
  NonAdopting,
  Lagging,
  DecliningModerate,
  Moderate,
  Decelerating,
  Leaping,
  Accelerating,
  Leading,
};

const char* path_name(AdoptionPath path);
AdoptionPath path_from_name(const std::string& name);
int path_order(AdoptionPath path);

struct PathAssignment {
  AdoptionPath path = AdoptionPath::NonAdopting;
  std::string rule_id;
};

/// Whether a profile can occur: the four zero markers must agree, a High
/// index excludes Late entry, and the index level must not contradict the
/// latest intensity given the trajectory.
bool is_feasible(const AdoptionProfile& profile);

/// Total classification of feasible profiles into paths; rule_id records
/// whether a criteria-table row or a fallback fired.
PathAssignment classify(const AdoptionProfile& profile);

/// Region-level tiering: profiles per entity plus the tier statistics
/// behind them.
struct RegionProfiles {
  std::vector<AdoptionProfile> profiles;
  TierStats ati_stats, entry_stats, lai_stats;
};

RegionProfiles build_profiles(std::span<const FeatureVector> features);

}  // namespace adoptpath
