#pragma once

#include <span>

namespace adoptpath {

/// Distribution summary: mean, median, population SD, Fisher-Pearson
/// skewness and excess kurtosis.  Constant samples report zero skewness
/// and kurtosis by convention.
struct MomentSummary {
  int n = 0;
  double mean = 0.0;
  double median = 0.0;
  double sd = 0.0;
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
};

MomentSummary moments(std::span<const double> values);

/// Median of a sample (average of the two central order statistics for
/// even sizes).
double median_of(std::span<const double> values);

/// Two-sided paired Wilcoxon signed-rank test.  Zero differences are
/// dropped; ties share mid-ranks.  With 5..25 usable pairs the null
/// distribution is enumerated exactly, beyond that a normal approximation
/// with tie correction and continuity correction is used.  When every
/// difference is zero the test is degenerate and reported as such.
struct WilcoxonResult {
  bool degenerate = false;
  int n_used = 0;
  double w = 0.0;        ///< min of the positive/negative rank sums
  double p_value = 1.0;
  bool exact = false;
};

WilcoxonResult wilcoxon_signed_rank(std::span<const double> first,
                                    std::span<const double> second);

}  // namespace adoptpath
