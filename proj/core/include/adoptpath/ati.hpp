#pragma once

#include <vector>

#include "adoptpath/dataset.hpp"
#include "adoptpath/fit.hpp"

namespace adoptpath {

struct QuadratureOptions {
  /// Relative tolerance for adaptive Simpson integration.
  double rel_tol = 1e-10;
};

/// A transversal crossing between an entity curve and the regional mean
/// curve.  alpha_sign is the sign of (C_entity' - C_mean') at the crossing;
/// s_factor is the feedback switch filled in by compute_ati: 0 or 1 when
/// the entity's area differs from the mean's, 0.5 on the knife edge where
/// they tie (the index is then exactly the normalized area either way).
struct Intersection {
  double time = 0.0;
  int alpha_sign = 0;
  double s_factor = 0.5;
};

/// Everything the adoption-over-time index computation produces for one
/// entity: the area under its fitted curve, the mean-normalized area
/// (a_norm, = 100 for an entity tracking the mean exactly), the crossing
/// list with feedback switches, the feedback durations, and the index.
struct AtiResult {
  double auc = 0.0;
  double a_norm = 0.0;
  double delta = 0.0;  ///< a_norm - 100
  std::vector<Intersection> intersections;
  double feedback_initial = 0.0;
  std::vector<double> feedback_terms;
  double ati = 0.0;
};

/// Integral of a fitted curve over [a, b]: closed form for Linear and
/// Polynomial, adaptive Simpson otherwise.
double integrate_curve(const FittedCurve& curve, double a, double b,
                       const QuadratureOptions& quad = {});
/// Integral over the curve's fitted domain.
double curve_auc(const FittedCurve& curve, const QuadratureOptions& quad = {});

/// Transversal crossings of entity and mean curves strictly inside (a, b).
/// A 2048-cell sign scan brackets candidates, bisection refines each root
/// to 1e-9 of the window, near-duplicate roots (within 1e-6 of the window)
/// are merged, crossings within 1e-6 of the window ends are dropped, and
/// tangential touches without a sign change are excluded.
std::vector<Intersection> find_intersections(const FittedCurve& entity,
                                             const FittedCurve& mean,
                                             double a, double b);
std::vector<Intersection> find_intersections(const FittedCurve& entity,
                                             const FittedCurve& mean);

/// Feedback switch (1 - alpha_sign * sgn(delta)) / 2: equals 0 when the
/// entity sits on its rewarded side after the crossing, 1 when penalized.
double feedback_factor(int alpha_sign, double delta);

/// Adoption-over-time index of one entity against the mean curve on [a, b],
/// given the mean curve's area on the same window.
AtiResult compute_ati(const FittedCurve& entity, const FittedCurve& mean,
                      double mean_auc, double a, double b,
                      const QuadratureOptions& quad = {});
AtiResult compute_ati(const FittedCurve& entity, const FittedCurve& mean,
                      double mean_auc, const QuadratureOptions& quad = {});

/// compute_ati with the zero-adopter short circuit: an all-zero observed
/// series scores exactly zero, regardless of any crossings a fitted mean
/// curve might have with the zero line.
AtiResult compute_entity_ati(const AdoptionSeries& series,
                             const FittedCurve& entity,
                             const FittedCurve& mean, double mean_auc,
                             const QuadratureOptions& quad = {});

/// Joint result of fitting a whole region and scoring every entity.
struct RegionAti {
  FittedCurve mean_curve;
  double mean_auc = 0.0;
  std::vector<FittedCurve> curves;   ///< per entity, dataset order
  std::vector<AtiResult> results;    ///< per entity, dataset order
};

RegionAti compute_region_ati(const RegionDataset& dataset,
                             const FitOptions& fit_options = {},
                             const QuadratureOptions& quad = {},
                             int threads = 1);

}  // namespace adoptpath
