#include "adoptpath/fit.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "adoptpath/errors.hpp"
#include "adoptpath/parallel.hpp"

namespace adoptpath {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Bounds {
  std::vector<double> lo, hi;
};

struct SeriesStats {
  double t_first, t_last, span;
  double y_max, y_last;
  double t_half;      // first time the series exceeds half its maximum
  double slope_max;   // steepest observed increment
};

SeriesStats series_stats(const TimeAxis& axis, const std::vector<double>& y) {
  SeriesStats s{};
  s.t_first = axis.front();
  s.t_last = axis.back();
  s.span = axis.span();
  s.y_max = *std::max_element(y.begin(), y.end());
  s.y_last = y.back();
  s.t_half = s.t_first + 0.5 * s.span;
  const double half = 0.5 * s.y_max;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] >= half) {
      if (i == 0 || y[i] == y[i - 1]) {
        s.t_half = axis.points[i];
      } else {
        const double w = (half - y[i - 1]) / (y[i] - y[i - 1]);
        s.t_half = axis.points[i - 1] + w * (axis.points[i] - axis.points[i - 1]);
      }
      break;
    }
  }
  s.slope_max = 0.0;
  for (std::size_t i = 1; i < y.size(); ++i) {
    const double dy = (y[i] - y[i - 1]) / (axis.points[i] - axis.points[i - 1]);
    s.slope_max = std::max(s.slope_max, dy);
  }
  return s;
}

Bounds family_bounds(CurveFamily family, const SeriesStats& s) {
  const double eps_k = 1e-9 * std::max(1.0, s.y_max);
  const double k_lo = s.y_max, k_hi = 10.0 * s.y_max + eps_k;
  const double r_lo = 0.01 / s.span, r_hi = 100.0 / s.span;
  const double t_lo = s.t_first - s.span, t_hi = s.t_last + s.span;
  switch (family) {
    case CurveFamily::Logistic:
    case CurveFamily::Bertalanffy:
      return {{k_lo, r_lo, t_lo}, {k_hi, r_hi, t_hi}};
    case CurveFamily::Gompertz:
      return {{k_lo, 1e-6, r_lo}, {k_hi, 1e3, r_hi}};
    case CurveFamily::Bass:
      return {{k_lo, 1e-4 / s.span, 1e-4 / s.span},
              {k_hi, 10.0 / s.span, 50.0 / s.span}};
    case CurveFamily::GeneralizedRichards:
      return {{k_lo, 1e-3, r_lo, t_lo, 0.1}, {k_hi, 1e3, r_hi, t_hi, 10.0}};
    case CurveFamily::CumulativeNormal:
      return {{k_lo, t_lo, 0.01 * s.span}, {k_hi, t_hi, 10.0 * s.span}};
    case CurveFamily::Exponential: {
      const double a_lo = 1e-12 * std::max(1.0, s.y_max);
      return {{a_lo, r_lo}, {k_hi, r_hi}};
    }
    default:
      throw ConfigError("fit: no box bounds for closed-form family");
  }
}

std::vector<double> clamp_to(const Bounds& b, std::vector<double> p) {
  for (std::size_t j = 0; j < p.size(); ++j) {
    p[j] = std::clamp(p[j], b.lo[j], b.hi[j]);
  }
  return p;
}

std::vector<std::vector<double>> family_seeds(CurveFamily family,
                                              const SeriesStats& s,
                                              const Bounds& bounds) {
  const double ymax = std::max(s.y_max, 1e-12);
  const double span = s.span;
  const double mid = s.t_first + 0.5 * span;
  const double th = s.t_half;
  const double r_est =
      std::clamp(4.0 * s.slope_max / ymax, 0.02 / span, 99.0 / span);
  std::vector<std::vector<double>> seeds;
  switch (family) {
    case CurveFamily::Logistic:
      seeds = {{ymax, r_est, th},
               {1.5 * ymax, r_est, th},
               {ymax, 2.0 / span, mid},
               {2.0 * ymax, 4.0 / span, mid},
               {ymax, 8.0 / span, s.t_first + 0.75 * span},
               {5.0 * ymax, 1.0 / span, s.t_last},
               {1.1 * ymax, 16.0 / span, s.t_first + 0.25 * span},
               {1.2 * ymax, 10.0 / span, th}};
      break;
    case CurveFamily::Gompertz: {
      for (double kf : {1.0, 1.5}) {
        for (double cf : {1.0, 2.0, 4.0, 8.0}) {
          const double K = kf * ymax;
          const double c = cf / span;
          // Aim the start of the curve near the first observation.
          const double y0 = std::max(1e-3 * K, 1e-12);
          const double b = -std::log(y0 / K) * std::exp(c * s.t_first);
          seeds.push_back({K, b, c});
        }
      }
      break;
    }
    case CurveFamily::Bass: {
      const double combos[8][3] = {{1.0, 2.0, 10.0},  {1.0, 5.0, 10.0},
                                   {1.0, 10.0, 30.0}, {1.5, 2.0, 30.0},
                                   {1.5, 5.0, 10.0},  {1.0, 5.0, 30.0},
                                   {2.0, 10.0, 10.0}, {1.2, 3.0, 20.0}};
      for (const auto& c : combos) {
        const double m = c[1] / span;
        seeds.push_back(
            {c[0] * ymax, m / (1.0 + c[2]), m * c[2] / (1.0 + c[2])});
      }
      break;
    }
    case CurveFamily::GeneralizedRichards:
      seeds = {{ymax, 1.0, r_est, th, 1.0},
               {1.5 * ymax, 1.0, r_est, th, 1.0},
               {ymax, 2.0, r_est, th, 0.5},
               {ymax, 0.5, r_est, th, 2.0},
               {ymax, 1.0, 2.0 / span, mid, 1.0},
               {1.5 * ymax, 1.0, 4.0 / span, mid, 1.0},
               {ymax, 2.0, 2.0 / span, mid, 2.0},
               {2.0 * ymax, 1.0, 8.0 / span, s.t_first + 0.75 * span, 0.5}};
      break;
    case CurveFamily::CumulativeNormal:
      seeds = {{ymax, th, span / 8.0},
               {ymax, th, span / 4.0},
               {1.5 * ymax, mid, span / 4.0},
               {ymax, mid, span / 2.0},
               {2.0 * ymax, s.t_first + 0.75 * span, span / 4.0},
               {1.2 * ymax, th, span / 2.0},
               {ymax, s.t_first + 0.25 * span, span / 8.0},
               {1.5 * ymax, s.t_first + 0.75 * span, span / 2.0}};
      break;
    case CurveFamily::Exponential:
      for (double bf : {0.5, 1.0, 2.0, 4.0}) {
        const double b = bf / span;
        const double denom = std::expm1(b * s.t_last);
        const double a = std::max(s.y_last, 0.5 * ymax) / std::max(denom, 1e-12);
        seeds.push_back({a, b});
        seeds.push_back({2.0 * a, b});
      }
      break;
    case CurveFamily::Bertalanffy:
      for (double kf : {1.0, 1.5}) {
        for (double t0 : {s.t_first, s.t_first - 0.5 * span}) {
          for (double kr : {1.0, 3.0}) {
            seeds.push_back({kf * ymax, kr / span, t0});
          }
        }
      }
      break;
    default:
      throw ConfigError("fit: no seeds for closed-form family");
  }
  for (auto& seed : seeds) seed = clamp_to(bounds, seed);
  return seeds;
}

double sum_squared_residuals(const Curve& c, const TimeAxis& axis,
                             const std::vector<double>& y) {
  double ss = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double r = c.value(axis.points[i]) - y[i];
    if (!std::isfinite(r)) return kInf;
    ss += r * r;
  }
  return ss;
}

// Central-difference Jacobian of the residual vector, with one-sided steps
// at box boundaries so parameters never leave their valid range.
void numeric_jacobian(Curve& c, const TimeAxis& axis, const Bounds& b,
                      Eigen::MatrixXd& J) {
  const auto n = static_cast<Eigen::Index>(axis.size());
  const auto m = static_cast<Eigen::Index>(c.params.size());
  for (Eigen::Index j = 0; j < m; ++j) {
    const double pj = c.params[j];
    const double h =
        6e-6 * std::max(std::abs(pj), 1e-3 * (b.hi[j] - b.lo[j]));
    const double pl = std::max(b.lo[j], pj - h);
    const double ph = std::min(b.hi[j], pj + h);
    if (!(ph > pl)) {
      J.col(j).setZero();
      continue;
    }
    c.params[j] = ph;
    for (Eigen::Index i = 0; i < n; ++i) J(i, j) = c.value(axis.points[i]);
    c.params[j] = pl;
    for (Eigen::Index i = 0; i < n; ++i) {
      J(i, j) = (J(i, j) - c.value(axis.points[i])) / (ph - pl);
    }
    c.params[j] = pj;
  }
}

struct LmOutcome {
  std::vector<double> params;
  double ss = kInf;
};

LmOutcome levenberg_marquardt(CurveFamily family, const TimeAxis& axis,
                              const std::vector<double>& y, const Bounds& b,
                              std::vector<double> seed,
                              const FitOptions& options) {
  Curve c{family, std::move(seed), 0.0, 1.0};
  const auto n = static_cast<Eigen::Index>(axis.size());
  const auto m = static_cast<Eigen::Index>(c.params.size());
  double ss = sum_squared_residuals(c, axis, y);
  if (!std::isfinite(ss)) return {c.params, kInf};

  Eigen::MatrixXd J(n, m);
  Eigen::VectorXd r(n);
  double lambda = 1e-3;
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    if (ss == 0.0) break;
    for (Eigen::Index i = 0; i < n; ++i) {
      r(i) = c.value(axis.points[i]) - y[i];
    }
    numeric_jacobian(c, axis, b, J);
    if (!J.allFinite()) break;
    const Eigen::MatrixXd H = J.transpose() * J;
    const Eigen::VectorXd g = J.transpose() * r;
    const double diag_floor = 1e-12 * H.trace() + 1e-300;

    bool stepped = false;
    for (int tries = 0; tries < 16 && !stepped; ++tries) {
      Eigen::MatrixXd A = H;
      for (Eigen::Index j = 0; j < m; ++j) {
        A(j, j) += lambda * std::max(H(j, j), diag_floor);
      }
      const Eigen::VectorXd delta = A.ldlt().solve(-g);
      if (!delta.allFinite()) {
        lambda *= 10.0;
        continue;
      }
      std::vector<double> trial(c.params);
      for (Eigen::Index j = 0; j < m; ++j) trial[j] += delta(j);
      trial = clamp_to(b, trial);
      Curve tc{family, trial, 0.0, 1.0};
      const double trial_ss = sum_squared_residuals(tc, axis, y);
      if (trial_ss < ss) {
        double rel_step = 0.0;
        for (Eigen::Index j = 0; j < m; ++j) {
          rel_step = std::max(rel_step, std::abs(trial[j] - c.params[j]) /
                                            std::max(std::abs(c.params[j]), 1e-12));
        }
        c.params = std::move(trial);
        ss = trial_ss;
        lambda = std::max(lambda / 3.0, 1e-12);
        stepped = true;
        if (rel_step < options.step_tolerance) {
          return {c.params, ss};
        }
      } else {
        lambda *= 10.0;
      }
    }
    if (!stepped) break;  // stalled: no damping level improves
  }
  return {c.params, ss};
}

double adjusted_r2(double r2, int n, int p) {
  const int dof = n - p - 1;
  if (dof < 1) return -kInf;  // saturated fits never win the adjusted ranking
  if (r2 >= 1.0) return 1.0;
  return 1.0 - (1.0 - r2) * (static_cast<double>(n - 1) / dof);
}

FittedCurve finish(Curve curve, double ss_res, double ss_tot,
                   const TimeAxis& axis, int n) {
  FittedCurve fc;
  fc.curve = std::move(curve);
  fc.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  fc.r2_adjusted = adjusted_r2(fc.r2, n, fc.curve.parameter_count());
  fc.domain_begin = axis.front();
  fc.domain_end = axis.back();
  return fc;
}

std::optional<FittedCurve> fit_polynomial_basis(const TimeAxis& axis,
                                                const std::vector<double>& y,
                                                int degree, bool as_linear) {
  const auto n = static_cast<Eigen::Index>(axis.size());
  const auto m = static_cast<Eigen::Index>(degree + 1);
  if (n < m) return std::nullopt;

  // Scale times into [-1, 1] for conditioning (natural basis for Linear).
  const double shift = as_linear ? 0.0 : 0.5 * (axis.front() + axis.back());
  const double scale = as_linear ? 1.0 : 0.5 * axis.span();
  Eigen::MatrixXd V(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = (axis.points[i] - shift) / scale;
    double acc = 1.0;
    for (Eigen::Index j = 0; j < m; ++j) {
      V(i, j) = acc;
      acc *= u;
    }
  }
  Eigen::Map<const Eigen::VectorXd> yv(y.data(), n);
  const Eigen::VectorXd coef = V.colPivHouseholderQr().solve(yv);
  if (!coef.allFinite()) return std::nullopt;

  Curve c;
  c.family = as_linear ? CurveFamily::Linear : CurveFamily::Polynomial;
  c.params.assign(coef.data(), coef.data() + m);
  c.shift = shift;
  c.scale = scale;
  const double ss_res = sum_squared_residuals(c, axis, y);

  const double mean = yv.mean();
  const double ss_tot = (yv.array() - mean).square().sum();
  const double ymax = yv.array().abs().maxCoeff();
  const double tol = 1e-24 * static_cast<double>(n) * std::max(1.0, ymax * ymax);
  if (ss_tot <= tol) {
    if (ss_res > tol) return std::nullopt;
    return finish(std::move(c), 0.0, 0.0, axis, static_cast<int>(n));
  }
  return finish(std::move(c), ss_res, ss_tot, axis, static_cast<int>(n));
}

}  // namespace

std::optional<FittedCurve> fit_family(const TimeAxis& axis,
                                      const std::vector<double>& values,
                                      CurveFamily family, int degree,
                                      const FitOptions& options) {
  const auto n = static_cast<int>(axis.size());
  if (values.size() != axis.size()) {
    throw DataError("fit: series length does not match axis");
  }
  if (family == CurveFamily::Linear) {
    return fit_polynomial_basis(axis, values, 1, /*as_linear=*/true);
  }
  if (family == CurveFamily::Polynomial) {
    if (degree < 2 || degree > n - 1) {
      throw ConfigError("fit: polynomial degree must lie in [2, T-1]");
    }
    return fit_polynomial_basis(axis, values, degree, /*as_linear=*/false);
  }

  if (n < family_parameter_count(family)) return std::nullopt;
  const SeriesStats stats = series_stats(axis, values);
  if (stats.y_max <= 0.0) return std::nullopt;  // sigmoids cannot stay at zero
  const Bounds bounds = family_bounds(family, stats);

  LmOutcome best;
  for (auto& seed : family_seeds(family, stats, bounds)) {
    LmOutcome out =
        levenberg_marquardt(family, axis, values, bounds, std::move(seed), options);
    if (out.ss < best.ss) best = std::move(out);
  }
  if (!std::isfinite(best.ss)) return std::nullopt;

  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double ss_tot = 0.0;
  for (double v : values) ss_tot += (v - mean) * (v - mean);
  const double tol =
      1e-24 * n * std::max(1.0, stats.y_max * stats.y_max);
  Curve c{family, std::move(best.params), 0.0, 1.0};
  if (ss_tot <= tol) {
    // Constant series: only an exact reproduction counts as a fit.
    if (best.ss <= tol) return finish(std::move(c), 0.0, 0.0, axis, n);
    return std::nullopt;
  }
  return finish(std::move(c), best.ss, ss_tot, axis, n);
}

FittedCurve select_best_curve(const TimeAxis& axis,
                              const std::vector<double>& values,
                              const FitOptions& options) {
  if (values.size() != axis.size()) {
    throw DataError("fit: series length does not match axis");
  }
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  if (*mn == *mx) {
    // Constant series (including all-zero): an exact flat line.
    FittedCurve fc;
    fc.curve = make_linear(*mn, 0.0);
    fc.r2 = 1.0;
    fc.r2_adjusted = 1.0;
    fc.domain_begin = axis.front();
    fc.domain_end = axis.back();
    return fc;
  }

  const auto n = static_cast<int>(axis.size());
  std::vector<FittedCurve> pool;
  for (auto family :
       {CurveFamily::Logistic, CurveFamily::Gompertz, CurveFamily::Bass,
        CurveFamily::GeneralizedRichards, CurveFamily::CumulativeNormal,
        CurveFamily::Exponential, CurveFamily::Bertalanffy}) {
    if (auto fc = fit_family(axis, values, family, -1, options)) {
      pool.push_back(std::move(*fc));
    }
  }
  for (int d = 2; d <= n - 1; ++d) {
    if (auto fc = fit_family(axis, values, CurveFamily::Polynomial, d, options)) {
      pool.push_back(std::move(*fc));
    }
  }
  if (auto fc = fit_family(axis, values, CurveFamily::Linear, -1, options)) {
    pool.push_back(std::move(*fc));
  }
  if (pool.empty()) throw DataError("fit: no family produced a fit");

  std::vector<const FittedCurve*> admitted;
  for (const auto& fc : pool) {
    if (fc.r2 > options.r2_admission) admitted.push_back(&fc);
  }
  const bool low_fit = admitted.empty();
  if (low_fit) {
    for (const auto& fc : pool) admitted.push_back(&fc);
  }

  auto metric = [&](const FittedCurve& fc) {
    if (low_fit || options.selection == FitOptions::Selection::PlainR2) {
      return fc.r2;
    }
    return fc.r2_adjusted;
  };
  const FittedCurve* best = admitted.front();
  for (const FittedCurve* fc : admitted) {
    const double a = metric(*fc), b = metric(*best);
    if (a > b) {
      best = fc;
    } else if (a == b) {
      const int pa = fc->curve.parameter_count();
      const int pb = best->curve.parameter_count();
      if (pa < pb || (pa == pb && family_order(fc->curve.family) <
                                      family_order(best->curve.family))) {
        best = fc;
      }
    }
  }
  FittedCurve result = *best;
  result.low_fit = low_fit;
  return result;
}

RegionCurves fit_region_curves(const RegionDataset& dataset,
                               const FitOptions& options, int threads) {
  RegionCurves region;
  region.mean_curve = select_best_curve(dataset.axis, dataset.mean_series,
                                        options);
  region.curves.resize(dataset.entity_count());
  parallel_for(dataset.entity_count(), threads, [&](std::size_t i) {
    region.curves[i] =
        select_best_curve(dataset.axis, dataset.series[i].values, options);
  });
  return region;
}

}  // namespace adoptpath
