#include "adoptpath/ati.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "adoptpath/errors.hpp"
#include "adoptpath/parallel.hpp"

namespace adoptpath {

namespace {

constexpr int kScanCells = 2048;
constexpr double kMergeFraction = 1e-6;
constexpr double kEndpointFraction = 1e-6;
constexpr double kBisectFraction = 1e-9;
constexpr double kDerivativeFloor = 1e-9;
constexpr double kProbeFraction = 1e-4;

int sign_of(double x) { return x > 0.0 ? 1 : (x < 0.0 ? -1 : 0); }

double simpson(double fa, double fm, double fb, double h) {
  return h / 6.0 * (fa + 4.0 * fm + fb);
}

struct SimpsonWorker {
  const Curve& curve;
  int max_depth = 48;

  double recurse(double a, double fa, double m, double fm, double b, double fb,
                 double whole, double eps, int depth) const {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = curve.value(lm), frm = curve.value(rm);
    const double left = simpson(fa, flm, fm, m - a);
    const double right = simpson(fm, frm, fb, b - m);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * eps) {
      return left + right + delta / 15.0;
    }
    return recurse(a, fa, lm, flm, m, fm, left, 0.5 * eps, depth - 1) +
           recurse(m, fm, rm, frm, b, fb, right, 0.5 * eps, depth - 1);
  }
};

double adaptive_simpson(const Curve& curve, double a, double b, double rel_tol) {
  constexpr int kPanels = 8;
  const double h = (b - a) / kPanels;
  double edges[kPanels + 1], mids[kPanels], fe[kPanels + 1], fm[kPanels];
  for (int i = 0; i <= kPanels; ++i) {
    edges[i] = a + h * i;
    fe[i] = curve.value(edges[i]);
  }
  double rough = 0.0;
  for (int i = 0; i < kPanels; ++i) {
    mids[i] = 0.5 * (edges[i] + edges[i + 1]);
    fm[i] = curve.value(mids[i]);
    rough += simpson(fe[i], fm[i], fe[i + 1], h);
  }
  const double eps = rel_tol * std::max(std::abs(rough), 1e-12) / kPanels;
  const SimpsonWorker worker{curve};
  double total = 0.0;
  for (int i = 0; i < kPanels; ++i) {
    total += worker.recurse(edges[i], fe[i], mids[i], fm[i], edges[i + 1],
                            fe[i + 1],
                            simpson(fe[i], fm[i], fe[i + 1], h), eps,
                            worker.max_depth);
  }
  return total;
}

}  // namespace

double integrate_curve(const FittedCurve& curve, double a, double b,
                       const QuadratureOptions& quad) {
  if (!(b > a)) throw ConfigError("ati: empty integration window");
  if (curve.curve.has_antiderivative()) {
    return curve.curve.antiderivative(b) - curve.curve.antiderivative(a);
  }
  if (!(quad.rel_tol > 0.0)) {
    throw ConfigError("ati: quadrature tolerance must be positive");
  }
  return adaptive_simpson(curve.curve, a, b, quad.rel_tol);
}

double curve_auc(const FittedCurve& curve, const QuadratureOptions& quad) {
  return integrate_curve(curve, curve.domain_begin, curve.domain_end, quad);
}

std::vector<Intersection> find_intersections(const FittedCurve& entity,
                                             const FittedCurve& mean,
                                             double a, double b) {
  if (!(b > a)) throw ConfigError("ati: empty intersection window");
  const double window = b - a;
  auto g = [&](double t) { return entity.value(t) - mean.value(t); };

  std::vector<double> gv(kScanCells + 1);
  for (int k = 0; k <= kScanCells; ++k) {
    gv[k] = g(a + window * k / kScanCells);
  }

  std::vector<double> roots;
  for (int k = 0; k < kScanCells; ++k) {
    const double t_lo = a + window * k / kScanCells;
    const double t_hi = a + window * (k + 1) / kScanCells;
    if (gv[k] == 0.0) {
      // Exact grid zero: transversal only if the nearest nonzero
      // neighbours disagree in sign; plateaus and touches are skipped.
      int left = 0, right = 0;
      for (int i = k - 1; i >= 0 && left == 0; --i) left = sign_of(gv[i]);
      for (int i = k + 1; i <= kScanCells && right == 0; ++i) {
        right = sign_of(gv[i]);
      }
      if (left != 0 && right != 0 && left != right) roots.push_back(t_lo);
      continue;
    }
    if (gv[k] * gv[k + 1] >= 0.0) continue;  // no sign change in this cell

    double lo = t_lo, hi = t_hi, glo = gv[k];
    while (hi - lo > kBisectFraction * window) {
      const double mid = 0.5 * (lo + hi);
      const double gmid = g(mid);
      if (gmid == 0.0) {
        lo = hi = mid;
        break;
      }
      if ((glo < 0.0) == (gmid < 0.0)) {
        lo = mid;
        glo = gmid;
      } else {
        hi = mid;
      }
    }
    roots.push_back(0.5 * (lo + hi));
  }

  std::sort(roots.begin(), roots.end());
  std::vector<Intersection> out;
  const double merge_tol = kMergeFraction * window;
  const double margin = kEndpointFraction * window;
  double last_kept = -std::numeric_limits<double>::infinity();
  for (double r : roots) {
    if (r - last_kept < merge_tol) continue;
    last_kept = r;
    if (r <= a + margin || r >= b - margin) continue;

    Intersection x;
    x.time = r;
    const double d = entity.derivative(r) - mean.derivative(r);
    if (std::abs(d) >= kDerivativeFloor) {
      x.alpha_sign = sign_of(d);
    } else {
      // Near-tangential crossing: decide the side from a point just after.
      int probe = sign_of(g(r + kProbeFraction * window));
      x.alpha_sign = probe != 0 ? probe : 1;
    }
    out.push_back(x);
  }
  return out;
}

std::vector<Intersection> find_intersections(const FittedCurve& entity,
                                             const FittedCurve& mean) {
  return find_intersections(entity, mean, entity.domain_begin,
                            entity.domain_end);
}

double feedback_factor(int alpha_sign, double delta) {
  return (1.0 - alpha_sign * sign_of(delta)) / 2.0;
}

AtiResult compute_ati(const FittedCurve& entity, const FittedCurve& mean,
                      double mean_auc, double a, double b,
                      const QuadratureOptions& quad) {
  if (!(mean_auc > 0.0)) {
    throw DataError("ati: mean curve area must be positive");
  }
  AtiResult res;
  res.auc = integrate_curve(entity, a, b, quad);
  res.a_norm = res.auc / mean_auc * 100.0;
  res.delta = res.a_norm - 100.0;
  res.intersections = find_intersections(entity, mean, a, b);

  // With no crossings (or delta == 0) the feedback sum contributes nothing
  // and the index equals the normalized area.
  double total = 0.0;
  if (!res.intersections.empty()) {
    for (auto& x : res.intersections) {
      x.s_factor = feedback_factor(x.alpha_sign, res.delta);
    }
    res.feedback_initial =
        (res.intersections.front().time - a) *
        (1.0 - res.intersections.front().s_factor);
    total = res.feedback_initial;
    for (std::size_t j = 0; j < res.intersections.size(); ++j) {
      const double t_next = j + 1 < res.intersections.size()
                                ? res.intersections[j + 1].time
                                : b;
      const double term =
          (t_next - res.intersections[j].time) * res.intersections[j].s_factor;
      res.feedback_terms.push_back(term);
      total += term;
    }
  }
  res.ati = res.a_norm - total / (b - a) * res.delta;
  return res;
}

AtiResult compute_ati(const FittedCurve& entity, const FittedCurve& mean,
                      double mean_auc, const QuadratureOptions& quad) {
  return compute_ati(entity, mean, mean_auc, entity.domain_begin,
                     entity.domain_end, quad);
}

AtiResult compute_entity_ati(const AdoptionSeries& series,
                             const FittedCurve& entity,
                             const FittedCurve& mean, double mean_auc,
                             const QuadratureOptions& quad) {
  if (series.all_zero()) {
    // A flat zero adopter scores exactly zero; crossings with the mean
    // curve (possible when a fitted mean dips through zero) are moot.
    AtiResult res;
    res.delta = -100.0;
    return res;
  }
  return compute_ati(entity, mean, mean_auc, quad);
}

RegionAti compute_region_ati(const RegionDataset& dataset,
                             const FitOptions& fit_options,
                             const QuadratureOptions& quad, int threads) {
  RegionCurves fitted = fit_region_curves(dataset, fit_options, threads);
  RegionAti region;
  region.mean_curve = std::move(fitted.mean_curve);
  region.curves = std::move(fitted.curves);
  region.mean_auc = curve_auc(region.mean_curve, quad);
  if (!(region.mean_auc > 0.0)) {
    throw DataError("ati: regional mean curve has non-positive area");
  }

  const std::size_t n = dataset.entity_count();
  region.results.resize(n);
  parallel_for(n, threads, [&](std::size_t i) {
    region.results[i] = compute_entity_ati(dataset.series[i], region.curves[i],
                                           region.mean_curve, region.mean_auc,
                                           quad);
  });
  return region;
}

}  // namespace adoptpath
