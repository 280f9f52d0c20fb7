#include "adoptpath/typology.hpp"

#include <cmath>

#include "adoptpath/errors.hpp"

namespace adoptpath {

namespace {

/// Half-width of the central band in population SDs; +-0.44 SD holds the
/// middle ~34% of a normal distribution.
constexpr double kBandHalfWidth = 0.44;

/// Band position of a value against the populated mean/SD: -1 below,
/// 0 inside (inclusive), +1 above.
int band_of(double value, const TierStats& stats) {
  const double lo = stats.mean - kBandHalfWidth * stats.sd;
  const double hi = stats.mean + kBandHalfWidth * stats.sd;
  if (value < lo) return -1;
  if (value > hi) return 1;
  return 0;
}

TierStats populated_stats(std::span<const double> values,
                          const std::vector<bool>& excluded) {
  TierStats stats;
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (excluded[i]) continue;
    sum += values[i];
    ++stats.n_used;
  }
  if (stats.n_used == 0) return stats;
  stats.mean = sum / stats.n_used;
  double m2 = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (excluded[i]) continue;
    const double d = values[i] - stats.mean;
    m2 += d * d;
  }
  stats.sd = std::sqrt(m2 / stats.n_used);
  return stats;
}

}  // namespace

const char* level_name(Level level) {
  switch (level) {
    case Level::Naught: return "Naught";
    case Level::Low: return "Low";
    case Level::Medium: return "Medium";
    case Level::High: return "High";
  }
  throw DataError("typology: unknown level");
}

Level level_from_name(const std::string& name) {
  for (auto l : {Level::Naught, Level::Low, Level::Medium, Level::High}) {
    if (name == level_name(l)) return l;
  }
  throw DataError("typology: unknown level name '" + name + "'");
}

const char* entry_level_name(EntryLevel level) {
  switch (level) {
    case EntryLevel::Null: return "Null";
    case EntryLevel::Early: return "Early";
    case EntryLevel::Middle: return "Middle";
    case EntryLevel::Late: return "Late";
  }
  throw DataError("typology: unknown entry level");
}

EntryLevel entry_level_from_name(const std::string& name) {
  for (auto l : {EntryLevel::Null, EntryLevel::Early, EntryLevel::Middle,
                 EntryLevel::Late}) {
    if (name == entry_level_name(l)) return l;
  }
  throw DataError("typology: unknown entry level name '" + name + "'");
}

std::vector<Level> assign_tiers(std::span<const double> values,
                                const std::vector<bool>& excluded,
                                TierStats* stats_out) {
  if (values.size() != excluded.size()) {
    throw DataError("typology: mask length mismatch");
  }
  const TierStats stats = populated_stats(values, excluded);
  if (stats_out) *stats_out = stats;
  std::vector<Level> tiers(values.size(), Level::Medium);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (excluded[i]) {
      tiers[i] = Level::Naught;
    } else if (stats.n_used < 2) {
      tiers[i] = Level::Medium;  // not enough spread to discriminate
    } else {
      const int band = band_of(values[i], stats);
      tiers[i] = band < 0 ? Level::Low : (band > 0 ? Level::High : Level::Medium);
    }
  }
  return tiers;
}

std::vector<EntryLevel> assign_entry_tiers(std::span<const double> values,
                                           const std::vector<bool>& excluded,
                                           TierStats* stats_out) {
  if (values.size() != excluded.size()) {
    throw DataError("typology: mask length mismatch");
  }
  const TierStats stats = populated_stats(values, excluded);
  if (stats_out) *stats_out = stats;
  std::vector<EntryLevel> tiers(values.size(), EntryLevel::Middle);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (excluded[i]) {
      tiers[i] = EntryLevel::Null;
    } else if (stats.n_used < 2) {
      tiers[i] = EntryLevel::Middle;
    } else {
      const int band = band_of(values[i], stats);
      tiers[i] = band < 0 ? EntryLevel::Early
                          : (band > 0 ? EntryLevel::Late : EntryLevel::Middle);
    }
  }
  return tiers;
}

const char* path_name(AdoptionPath path) {
  switch (path) {
    case AdoptionPath::NonAdopting: return "NonAdopting";
    case AdoptionPath::Lagging: return "Lagging";
    case AdoptionPath::DecliningModerate: return "DecliningModerate";
    case AdoptionPath::Moderate: return "Moderate";
    case AdoptionPath::Decelerating: return "Decelerating";
    case AdoptionPath::Leaping: return "Leaping";
    case AdoptionPath::Accelerating: return "Accelerating";
    case AdoptionPath::Leading: return "Leading";
  }
  throw DataError("typology: unknown path");
}

AdoptionPath path_from_name(const std::string& name) {
  for (int i = 0; i < 8; ++i) {
    const auto p = static_cast<AdoptionPath>(i);
    if (name == path_name(p)) return p;
  }
  throw DataError("typology: unknown path name '" + name + "'");
}

int path_order(AdoptionPath path) { return static_cast<int>(path); }

bool is_feasible(const AdoptionProfile& p) {
  const bool zero_ati = p.ati_tier == Level::Naught;
  const bool zero_entry = p.entry_tier == EntryLevel::Null;
  const bool zero_traj = p.trajectory == Trajectory::Null;
  const bool zero_lai = p.lai_tier == Level::Naught;
  // R0: the four zero markers describe the same entities.
  if (zero_ati != zero_entry || zero_ati != zero_traj || zero_ati != zero_lai) {
    return false;
  }
  if (zero_ati) return true;
  // R1: a leading index cannot come from a late entrant.
  if (p.ati_tier == Level::High && p.entry_tier == EntryLevel::Late) {
    return false;
  }
  // R2: a low index with high latest intensity requires late growth.
  if (p.ati_tier == Level::Low && p.lai_tier == Level::High &&
      p.trajectory != Trajectory::Uphill) {
    return false;
  }
  // R3: a high index with low latest intensity requires a decline.
  if (p.ati_tier == Level::High && p.lai_tier == Level::Low &&
      p.trajectory != Trajectory::Downhill) {
    return false;
  }
  return true;
}

PathAssignment classify(const AdoptionProfile& profile) {
  if (!is_feasible(profile)) {
    throw DataError("typology: infeasible profile");
  }
  if (profile.ati_tier == Level::Naught) {
    return {AdoptionPath::NonAdopting, "table:non-adopting"};
  }
  // Defensive coercion for raw inputs: with a positive index a Null entry
  // reads as Late and a Naught latest intensity as Low.
  const EntryLevel entry = profile.entry_tier == EntryLevel::Null
                               ? EntryLevel::Late
                               : profile.entry_tier;
  const Level lai =
      profile.lai_tier == Level::Naught ? Level::Low : profile.lai_tier;
  const Level ati = profile.ati_tier;
  const Trajectory traj = profile.trajectory;

  const bool early = entry == EntryLevel::Early;
  const bool early_or_mid = entry != EntryLevel::Late;

  // Criteria table, first matching row wins.
  if (ati == Level::High && early && traj == Trajectory::Stable &&
      lai == Level::High) {
    return {AdoptionPath::Leading, "table:leading"};
  }
  if (ati == Level::High && early && traj == Trajectory::Uphill &&
      lai == Level::High) {
    return {AdoptionPath::Accelerating, "table:accelerating"};
  }
  if (ati == Level::High && early && traj == Trajectory::Downhill &&
      lai != Level::High) {
    return {AdoptionPath::Decelerating, "table:decelerating"};
  }
  if (ati != Level::High && entry == EntryLevel::Late &&
      traj == Trajectory::Uphill && lai == Level::High) {
    return {AdoptionPath::Leaping, "table:leaping"};
  }
  if (ati == Level::Medium && early_or_mid &&
      (traj == Trajectory::Stable || traj == Trajectory::Uphill) &&
      lai == Level::Medium) {
    return {AdoptionPath::Moderate, "table:moderate"};
  }
  if (ati == Level::Medium && early_or_mid && traj == Trajectory::Downhill &&
      lai == Level::Low) {
    return {AdoptionPath::DecliningModerate, "table:declining-moderate"};
  }
  if (ati == Level::Low &&
      (traj == Trajectory::Stable || traj == Trajectory::Downhill) &&
      lai == Level::Low) {
    return {AdoptionPath::Lagging, "table:lagging"};
  }

  // Deterministic fallbacks keyed on index tier, then trajectory.
  if (ati == Level::High) {
    if (traj == Trajectory::Downhill) {
      return {AdoptionPath::Decelerating, "fallback:high-downhill"};
    }
    if (traj == Trajectory::Uphill) {
      return {AdoptionPath::Accelerating, "fallback:high-uphill"};
    }
    return {AdoptionPath::Leading, "fallback:high-stable"};
  }
  if (ati == Level::Medium) {
    if (traj == Trajectory::Downhill) {
      return {AdoptionPath::DecliningModerate, "fallback:medium-downhill"};
    }
    if (entry == EntryLevel::Late && traj == Trajectory::Uphill &&
        lai == Level::High) {
      return {AdoptionPath::Leaping, "fallback:medium-leap"};
    }
    return {AdoptionPath::Moderate, "fallback:medium"};
  }
  if (traj == Trajectory::Uphill && lai != Level::Low) {
    return {AdoptionPath::Leaping, "fallback:low-leap"};
  }
  return {AdoptionPath::Lagging, "fallback:low"};
}

RegionProfiles build_profiles(std::span<const FeatureVector> features) {
  const std::size_t n = features.size();
  std::vector<double> ati(n), lai(n), entry(n, 0.0);
  std::vector<bool> ati_zero(n), lai_zero(n), entry_null(n);
  for (std::size_t i = 0; i < n; ++i) {
    ati[i] = features[i].ati;
    lai[i] = features[i].lai;
    ati_zero[i] = features[i].ati == 0.0;
    lai_zero[i] = features[i].lai == 0.0;
    entry_null[i] = !features[i].entry.value.has_value();
    if (features[i].entry.value) entry[i] = *features[i].entry.value;
  }

  RegionProfiles out;
  const auto ati_tiers = assign_tiers(ati, ati_zero, &out.ati_stats);
  const auto lai_tiers = assign_tiers(lai, lai_zero, &out.lai_stats);
  const auto entry_tiers = assign_entry_tiers(entry, entry_null, &out.entry_stats);

  out.profiles.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    AdoptionProfile& p = out.profiles[i];
    if (features[i].ati == 0.0) {
      p = {Level::Naught, EntryLevel::Null, Trajectory::Null, Level::Naught};
      continue;
    }
    p.ati_tier = ati_tiers[i];
    p.entry_tier =
        entry_null[i] ? EntryLevel::Late : entry_tiers[i];  // never reached
    p.trajectory = features[i].trajectory;
    p.lai_tier = lai_zero[i] ? Level::Low : lai_tiers[i];  // faded to zero
  }
  return out;
}

}  // namespace adoptpath
