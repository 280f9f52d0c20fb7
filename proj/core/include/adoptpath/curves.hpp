#pragma once

#include <span>
#include <string>
#include <vector>

namespace adoptpath {

/// Candidate cumulative-growth families, in fitting/tie-break order.
enum class CurveFamily {
  Logistic,
  Gompertz,
  Bass,
  GeneralizedRichards,
  CumulativeNormal,
  Exponential,
  Bertalanffy,
  Polynomial,
  Linear,
};

const char* family_name(CurveFamily family);
CurveFamily family_from_name(const std::string& name);

/// Position in the candidate list; lower wins ties after parameter count.
int family_order(CurveFamily family);

/// Fixed parameter count per family, or -1 for Polynomial (degree + 1).
int family_parameter_count(CurveFamily family);

/// A parameterized cumulative curve C(t).  Parameter layout per family:
///
///   Logistic            K, r, t0      K / (1 + exp(-r (t - t0)))
///   Gompertz            K, b, c       K exp(-b exp(-c t))
///   Bass                K, p, q       K (1 - e^{-(p+q) t}) / (1 + (q/p) e^{-(p+q) t})
///   GeneralizedRichards K, Q, r, t0, v  K (1 + Q exp(-r (t - t0)))^{-1/v}
///   CumulativeNormal    K, mu, sigma  K Phi((t - mu) / sigma)
///   Exponential         a, b          a (e^{b t} - 1)
///   Bertalanffy         K, k, t0      K (1 - exp(-k (t - t0)))^3
///   Polynomial          c0..cd        sum c_k u^k with u = (t - shift) / scale
///   Linear              c0, c1        c0 + c1 t
///
/// Polynomial coefficients live in a shifted/scaled basis for conditioning;
/// all other families ignore shift/scale.
struct Curve {
  CurveFamily family = CurveFamily::Linear;
  std::vector<double> params;
  double shift = 0.0;
  double scale = 1.0;

  double value(double t) const;
  double derivative(double t) const;

  /// True for Linear and Polynomial, whose integrals are closed-form.
  bool has_antiderivative() const;
  /// Antiderivative with F(shift) = 0; only meaningful differences F(b)-F(a).
  double antiderivative(double t) const;

  int parameter_count() const { return static_cast<int>(params.size()); }
  int polynomial_degree() const;
};

Curve make_linear(double intercept, double slope);
/// Coefficients in the natural t basis, lowest order first.
Curve make_polynomial(std::span<const double> coefficients);

}  // namespace adoptpath
