// Microbenchmarks for the hot paths: curve fitting, quadrature,
// intersection scanning, and whole-region scoring.

#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "adoptpath/ati.hpp"
#include "adoptpath/dataset.hpp"
#include "adoptpath/fit.hpp"
#include "adoptpath/stats.hpp"

namespace {

using namespace adoptpath;

TimeAxis uniform_axis(int n, double a, double b) {
  TimeAxis ax;
  for (int i = 0; i < n; ++i) {
    ax.points.push_back(a + (b - a) * i / (n - 1));
    ax.labels.push_back(std::to_string(ax.points.back()));
  }
  return ax;
}

FittedCurve curve_of(CurveFamily family, std::vector<double> params,
                     double a, double b) {
  FittedCurve fc;
  fc.curve.family = family;
  fc.curve.params = std::move(params);
  fc.domain_begin = a;
  fc.domain_end = b;
  return fc;
}

/// Synthetic region shaped like the expected workload: a handful of annual
/// observations per entity, sigmoid-ish adoption levels.
RegionDataset synthetic_region(int entities, int points) {
  const TimeAxis ax = uniform_axis(points, 0.0, points - 1.0);
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> K(10.0, 120.0), r(0.4, 1.4),
      t0(1.0, points - 2.0);
  std::vector<AdoptionSeries> series;
  for (int e = 0; e < entities; ++e) {
    auto truth = curve_of(CurveFamily::Logistic, {K(rng), r(rng), t0(rng)},
                          0.0, points - 1.0);
    AdoptionSeries s;
    s.entity_id = "entity-" + std::to_string(1000 + e);
    for (double t : ax.points) s.values.push_back(truth.value(t));
    series.push_back(std::move(s));
  }
  return make_region(ax, series);
}

void BM_SelectBestCurve(benchmark::State& state) {
  const auto n = static_cast<int>(state.range(0));
  const TimeAxis ax = uniform_axis(n, 0.0, n - 1.0);
  auto truth = curve_of(CurveFamily::Logistic, {80, 0.9, 0.4 * n}, 0, n - 1.0);
  std::vector<double> v;
  for (double t : ax.points) v.push_back(truth.value(t));
  for (auto _ : state) {
    benchmark::DoNotOptimize(select_best_curve(ax, v));
  }
}
BENCHMARK(BM_SelectBestCurve)->Arg(6)->Arg(12)->Arg(25);

void BM_CurveAuc(benchmark::State& state) {
  auto fc = curve_of(CurveFamily::Gompertz, {80, 4.0, 0.6}, 0.0, 10.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(curve_auc(fc));
  }
}
BENCHMARK(BM_CurveAuc);

void BM_FindIntersections(benchmark::State& state) {
  auto entity = curve_of(CurveFamily::Logistic, {90, 0.8, 6.0}, 0.0, 10.0);
  auto mean = curve_of(CurveFamily::Logistic, {70, 1.1, 4.0}, 0.0, 10.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(find_intersections(entity, mean, 0.0, 10.0));
  }
}
BENCHMARK(BM_FindIntersections);

void BM_RegionAti(benchmark::State& state) {
  const auto ds = synthetic_region(static_cast<int>(state.range(0)), 6);
  for (auto _ : state) {
    benchmark::DoNotOptimize(compute_region_ati(ds));
  }
}
BENCHMARK(BM_RegionAti)->Arg(12)->Arg(48);

void BM_WilcoxonExact(benchmark::State& state) {
  const auto n = static_cast<int>(state.range(0));
  std::mt19937 rng(7);
  std::normal_distribution<double> d(0.3, 1.0);
  std::vector<double> first(n), second(n, 0.0);
  for (auto& x : first) x = d(rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(wilcoxon_signed_rank(first, second));
  }
}
BENCHMARK(BM_WilcoxonExact)->Arg(12)->Arg(25);

}  // namespace

BENCHMARK_MAIN();
