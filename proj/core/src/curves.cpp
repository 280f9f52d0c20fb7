#include "adoptpath/curves.hpp"

#include <cmath>

#include "adoptpath/errors.hpp"

namespace adoptpath {

namespace {

// Overflow-safe 1 / (1 + e^{-z}).
double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// Overflow-safe log(1 + e^w).
double softplus(double w) {
  if (w > 35.0) return w;
  if (w < -35.0) return std::exp(w);
  return std::log1p(std::exp(w));
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double normal_pdf(double z) {
  static const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * M_PI);
  return inv_sqrt_2pi * std::exp(-0.5 * z * z);
}

double horner(const std::vector<double>& c, double u) {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * u + *it;
  return acc;
}

}  // namespace

const char* family_name(CurveFamily family) {
  switch (family) {
    case CurveFamily::Logistic: return "Logistic";
    case CurveFamily::Gompertz: return "Gompertz";
    case CurveFamily::Bass: return "Bass";
    case CurveFamily::GeneralizedRichards: return "GeneralizedRichards";
    case CurveFamily::CumulativeNormal: return "CumulativeNormal";
    case CurveFamily::Exponential: return "Exponential";
    case CurveFamily::Bertalanffy: return "Bertalanffy";
    case CurveFamily::Polynomial: return "Polynomial";
    case CurveFamily::Linear: return "Linear";
  }
  throw DataError("curves: unknown family");
}

CurveFamily family_from_name(const std::string& name) {
  for (int i = 0; i <= static_cast<int>(CurveFamily::Linear); ++i) {
    const auto f = static_cast<CurveFamily>(i);
    if (name == family_name(f)) return f;
  }
  throw DataError("curves: unknown family name '" + name + "'");
}

int family_order(CurveFamily family) { return static_cast<int>(family); }

int family_parameter_count(CurveFamily family) {
  switch (family) {
    case CurveFamily::Logistic: return 3;
    case CurveFamily::Gompertz: return 3;
    case CurveFamily::Bass: return 3;
    case CurveFamily::GeneralizedRichards: return 5;
    case CurveFamily::CumulativeNormal: return 3;
    case CurveFamily::Exponential: return 2;
    case CurveFamily::Bertalanffy: return 3;
    case CurveFamily::Polynomial: return -1;
    case CurveFamily::Linear: return 2;
  }
  throw DataError("curves: unknown family");
}

double Curve::value(double t) const {
  switch (family) {
    case CurveFamily::Logistic: {
      const double K = params[0], r = params[1], t0 = params[2];
      return K * sigmoid(r * (t - t0));
    }
    case CurveFamily::Gompertz: {
      const double K = params[0], b = params[1], c = params[2];
      return K * std::exp(-b * std::exp(-c * t));
    }
    case CurveFamily::Bass: {
      const double K = params[0], p = params[1], q = params[2];
      const double e = std::exp(-(p + q) * t);
      return K * (1.0 - e) / (1.0 + (q / p) * e);
    }
    case CurveFamily::GeneralizedRichards: {
      const double K = params[0], Q = params[1], r = params[2];
      const double t0 = params[3], v = params[4];
      const double w = std::log(Q) - r * (t - t0);
      return K * std::exp(-softplus(w) / v);
    }
    case CurveFamily::CumulativeNormal: {
      const double K = params[0], mu = params[1], sigma = params[2];
      return K * normal_cdf((t - mu) / sigma);
    }
    case CurveFamily::Exponential: {
      const double a = params[0], b = params[1];
      return a * std::expm1(b * t);
    }
    case CurveFamily::Bertalanffy: {
      const double K = params[0], k = params[1], t0 = params[2];
      const double u = 1.0 - std::exp(-k * (t - t0));
      return K * u * u * u;
    }
    case CurveFamily::Polynomial:
      return horner(params, (t - shift) / scale);
    case CurveFamily::Linear:
      return params[0] + params[1] * t;
  }
  throw DataError("curves: unknown family");
}

double Curve::derivative(double t) const {
  switch (family) {
    case CurveFamily::Logistic: {
      const double K = params[0], r = params[1], t0 = params[2];
      const double s = sigmoid(r * (t - t0));
      return K * r * s * (1.0 - s);
    }
    case CurveFamily::Gompertz: {
      const double K = params[0], b = params[1], c = params[2];
      const double inner = std::exp(-c * t);
      return K * b * c * inner * std::exp(-b * inner);
    }
    case CurveFamily::Bass: {
      const double K = params[0], p = params[1], q = params[2];
      const double m = p + q;
      const double e = std::exp(-m * t);
      const double denom = 1.0 + (q / p) * e;
      return K * (m * m / p) * e / (denom * denom);
    }
    case CurveFamily::GeneralizedRichards: {
      const double r = params[2], v = params[4];
      const double Q = params[1], t0 = params[3];
      const double w = std::log(Q) - r * (t - t0);
      return value(t) * (r / v) * sigmoid(w);
    }
    case CurveFamily::CumulativeNormal: {
      const double K = params[0], mu = params[1], sigma = params[2];
      return K * normal_pdf((t - mu) / sigma) / sigma;
    }
    case CurveFamily::Exponential: {
      const double a = params[0], b = params[1];
      return a * b * std::exp(b * t);
    }
    case CurveFamily::Bertalanffy: {
      const double K = params[0], k = params[1], t0 = params[2];
      const double e = std::exp(-k * (t - t0));
      const double u = 1.0 - e;
      return K * 3.0 * u * u * k * e;
    }
    case CurveFamily::Polynomial: {
      const double u = (t - shift) / scale;
      double acc = 0.0;
      for (std::size_t k = params.size(); k-- > 1;) {
        acc = acc * u + static_cast<double>(k) * params[k];
      }
      return acc / scale;
    }
    case CurveFamily::Linear:
      return params[1];
  }
  throw DataError("curves: unknown family");
}

bool Curve::has_antiderivative() const {
  return family == CurveFamily::Polynomial || family == CurveFamily::Linear;
}

double Curve::antiderivative(double t) const {
  switch (family) {
    case CurveFamily::Linear:
      return params[0] * t + 0.5 * params[1] * t * t;
    case CurveFamily::Polynomial: {
      const double u = (t - shift) / scale;
      double acc = 0.0;
      for (std::size_t k = params.size(); k-- > 0;) {
        acc = acc * u + params[k] / static_cast<double>(k + 1);
      }
      return scale * acc * u;
    }
    default:
      throw DataError("curves: no closed-form antiderivative for family " +
                      std::string(family_name(family)));
  }
}

int Curve::polynomial_degree() const {
  if (family == CurveFamily::Polynomial) {
    return static_cast<int>(params.size()) - 1;
  }
  if (family == CurveFamily::Linear) return 1;
  return -1;
}

Curve make_linear(double intercept, double slope) {
  Curve c;
  c.family = CurveFamily::Linear;
  c.params = {intercept, slope};
  return c;
}

Curve make_polynomial(std::span<const double> coefficients) {
  if (coefficients.empty()) throw DataError("curves: empty polynomial");
  Curve c;
  c.family = CurveFamily::Polynomial;
  c.params.assign(coefficients.begin(), coefficients.end());
  return c;
}

}  // namespace adoptpath
