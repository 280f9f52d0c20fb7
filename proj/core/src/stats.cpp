#include "adoptpath/stats.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "adoptpath/errors.hpp"

namespace adoptpath {

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

double median_of(std::span<const double> values) {
  if (values.empty()) throw DataError("stats: median of empty sample");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  if (n % 2 == 1) return sorted[n / 2];
  return 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

MomentSummary moments(std::span<const double> values) {
  if (values.empty()) throw DataError("stats: moments of empty sample");
  MomentSummary s;
  s.n = static_cast<int>(values.size());
  const double n = static_cast<double>(s.n);
  for (double v : values) s.mean += v;
  s.mean /= n;
  s.median = median_of(values);

  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : values) {
    const double d = v - s.mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  s.sd = std::sqrt(m2);
  if (s.sd > 0.0) {
    s.skewness = m3 / (s.sd * s.sd * s.sd);
    s.excess_kurtosis = m4 / (m2 * m2) - 3.0;
  }
  return s;
}

WilcoxonResult wilcoxon_signed_rank(std::span<const double> first,
                                    std::span<const double> second) {
  if (first.size() != second.size()) {
    throw ConfigError("stats: paired samples differ in length");
  }
  if (first.empty()) throw DataError("stats: empty paired sample");

  std::vector<double> diffs;
  for (std::size_t i = 0; i < first.size(); ++i) {
    const double d = first[i] - second[i];
    if (d != 0.0) diffs.push_back(d);
  }
  WilcoxonResult res;
  res.n_used = static_cast<int>(diffs.size());
  if (diffs.empty()) {
    res.degenerate = true;
    return res;
  }
  if (res.n_used < 5) {
    throw DataError("stats: fewer than 5 nonzero differences");
  }

  // Rank |d| ascending with mid-ranks for ties.
  const std::size_t n = diffs.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(diffs[a]) < std::abs(diffs[b]);
  });
  std::vector<double> rank(n);
  double tie_correction = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && std::abs(diffs[order[j]]) == std::abs(diffs[order[i]])) {
      ++j;
    }
    const double mid = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
    for (std::size_t k = i; k < j; ++k) rank[order[k]] = mid;
    const double t = static_cast<double>(j - i);
    tie_correction += (t * t * t - t) / 48.0;
    i = j;
  }

  double w_plus = 0.0, w_minus = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    (diffs[i] > 0.0 ? w_plus : w_minus) += rank[i];
  }
  res.w = std::min(w_plus, w_minus);

  if (n <= 25) {
    // Exact null distribution over all sign assignments, on doubled ranks
    // so mid-ranks stay integral.
    res.exact = true;
    const auto w2_max = static_cast<std::size_t>(std::llround(
        2.0 * (static_cast<double>(n) * (n + 1) / 2.0)));
    std::vector<double> count(w2_max + 1, 0.0);
    count[0] = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto d2 = static_cast<std::size_t>(std::llround(2.0 * rank[i]));
      for (std::size_t w2 = w2_max; w2 + 1 > d2; --w2) {
        if (count[w2 - d2] > 0.0) count[w2] += count[w2 - d2];
      }
    }
    const auto w2_obs = static_cast<std::size_t>(std::llround(2.0 * res.w));
    double below = 0.0, total = 0.0;
    for (std::size_t w2 = 0; w2 <= w2_max; ++w2) {
      total += count[w2];
      if (w2 <= w2_obs) below += count[w2];
    }
    res.p_value = std::min(1.0, 2.0 * below / total);
  } else {
    const double nn = static_cast<double>(n);
    const double mean = nn * (nn + 1.0) / 4.0;
    const double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_correction;
    if (!(var > 0.0)) {
      res.degenerate = true;
      return res;
    }
    const double z = (res.w - mean + 0.5) / std::sqrt(var);
    res.p_value = std::min(1.0, 2.0 * normal_cdf(z));
  }
  return res;
}

}  // namespace adoptpath
