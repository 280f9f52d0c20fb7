#pragma once

#include <optional>
#include <vector>

#include "adoptpath/curves.hpp"
#include "adoptpath/dataset.hpp"

namespace adoptpath {

struct FitOptions {
  enum class Selection { AdjustedR2, PlainR2 };

  /// Candidates with r2 strictly above this are admitted to selection.
  double r2_admission = 0.9;
  Selection selection = Selection::AdjustedR2;
  int max_iterations = 200;
  /// Relative parameter step below which the optimizer stops.
  double step_tolerance = 1e-10;
};

/// A curve fitted to one series, with its goodness of fit and the time
/// domain it was fitted on.  low_fit marks series where no candidate
/// family cleared the admission threshold.
struct FittedCurve {
  Curve curve;
  double r2 = 0.0;
  double r2_adjusted = 0.0;
  double domain_begin = 0.0;
  double domain_end = 0.0;
  bool low_fit = false;

  double value(double t) const { return curve.value(t); }
  double derivative(double t) const { return curve.derivative(t); }
};

/// Least-squares fit of one family to a series.  Nonlinear families run a
/// damped Levenberg-Marquardt search from several deterministic starts
/// under box bounds; Polynomial/Linear solve directly.  Returns nothing
/// when the family cannot represent the series (too few points, no seed
/// converged, or constant data the family cannot reproduce exactly).
/// `degree` applies to Polynomial only and must lie in [2, T-1].
std::optional<FittedCurve> fit_family(const TimeAxis& axis,
                                      const std::vector<double>& values,
                                      CurveFamily family, int degree = -1,
                                      const FitOptions& options = {});

/// Fits every candidate family (Polynomial at degrees 2..T-1) and picks the
/// winner: among candidates with r2 above the admission threshold, the best
/// by the configured selection metric, ties broken by fewer parameters and
/// then family order.  If nothing is admitted, falls back to the highest
/// plain r2 and sets low_fit.  A constant series short-circuits to an exact
/// Linear fit.
FittedCurve select_best_curve(const TimeAxis& axis,
                              const std::vector<double>& values,
                              const FitOptions& options = {});

/// Curves for a whole region: the mean series and every entity, fitted
/// with select_best_curve (entities in dataset order, optionally in
/// parallel; results do not depend on the thread count).
struct RegionCurves {
  FittedCurve mean_curve;
  std::vector<FittedCurve> curves;
};

RegionCurves fit_region_curves(const RegionDataset& dataset,
                               const FitOptions& options = {},
                               int threads = 1);

}  // namespace adoptpath
