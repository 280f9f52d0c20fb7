#include <doctest.h>

#include <cmath>
#include <vector>

#include "adoptpath/curves.hpp"
#include "adoptpath/errors.hpp"

using namespace adoptpath;

namespace {

Curve curve_of(CurveFamily family, std::vector<double> params) {
  Curve c;
  c.family = family;
  c.params = std::move(params);
  return c;
}

double central_diff(const Curve& c, double t) {
  const double h = 1e-6 * std::max(1.0, std::fabs(t));
  return (c.value(t + h) - c.value(t - h)) / (2 * h);
}

}  // namespace

TEST_CASE("family names round-trip and order follows the candidate list") {
  for (auto f : {CurveFamily::Logistic, CurveFamily::Gompertz, CurveFamily::Bass,
                 CurveFamily::GeneralizedRichards, CurveFamily::CumulativeNormal,
                 CurveFamily::Exponential, CurveFamily::Bertalanffy,
                 CurveFamily::Polynomial, CurveFamily::Linear}) {
    CHECK(family_from_name(family_name(f)) == f);
  }
  CHECK(family_order(CurveFamily::Logistic) < family_order(CurveFamily::Linear));
  CHECK_THROWS_AS(family_from_name("Cubist"), DataError);
  CHECK(family_parameter_count(CurveFamily::GeneralizedRichards) == 5);
  CHECK(family_parameter_count(CurveFamily::Polynomial) == -1);
}

TEST_CASE("curve values match their defining formulas") {
  const double t = 1.7;

  auto logistic = curve_of(CurveFamily::Logistic, {10, 0.8, 2.0});
  CHECK(logistic.value(t) ==
        doctest::Approx(10 / (1 + std::exp(-0.8 * (t - 2.0)))).epsilon(1e-12));

  auto gompertz = curve_of(CurveFamily::Gompertz, {10, 3.0, 0.5});
  CHECK(gompertz.value(t) ==
        doctest::Approx(10 * std::exp(-3.0 * std::exp(-0.5 * t))).epsilon(1e-12));

  auto bass = curve_of(CurveFamily::Bass, {10, 0.03, 0.4});
  const double m = 0.43;
  const double e = std::exp(-m * t);
  CHECK(bass.value(t) ==
        doctest::Approx(10 * (1 - e) / (1 + (0.4 / 0.03) * e)).epsilon(1e-12));

  auto richards = curve_of(CurveFamily::GeneralizedRichards, {10, 2.0, 0.9, 1.5, 0.7});
  CHECK(richards.value(t) ==
        doctest::Approx(10 * std::pow(1 + 2.0 * std::exp(-0.9 * (t - 1.5)), -1 / 0.7))
            .epsilon(1e-12));

  auto normal = curve_of(CurveFamily::CumulativeNormal, {10, 2.0, 1.5});
  CHECK(normal.value(t) ==
        doctest::Approx(10 * 0.5 * std::erfc(-(t - 2.0) / (1.5 * std::sqrt(2.0))))
            .epsilon(1e-12));

  auto expo = curve_of(CurveFamily::Exponential, {2.0, 0.3});
  CHECK(expo.value(t) == doctest::Approx(2.0 * std::expm1(0.3 * t)).epsilon(1e-12));

  auto bert = curve_of(CurveFamily::Bertalanffy, {10, 0.6, 0.2});
  CHECK(bert.value(t) ==
        doctest::Approx(10 * std::pow(1 - std::exp(-0.6 * (t - 0.2)), 3)).epsilon(1e-12));
}

TEST_CASE("derivatives agree with central differences for every family") {
  std::vector<Curve> curves = {
      curve_of(CurveFamily::Logistic, {10, 0.8, 2.0}),
      curve_of(CurveFamily::Gompertz, {10, 3.0, 0.5}),
      curve_of(CurveFamily::Bass, {10, 0.03, 0.4}),
      curve_of(CurveFamily::GeneralizedRichards, {10, 2.0, 0.9, 1.5, 0.7}),
      curve_of(CurveFamily::CumulativeNormal, {10, 2.0, 1.5}),
      curve_of(CurveFamily::Exponential, {2.0, 0.3}),
      curve_of(CurveFamily::Bertalanffy, {10, 0.6, 0.2}),
      make_linear(1.0, 2.5),
      make_polynomial(std::vector<double>{1.0, -2.0, 0.5, 0.25}),
  };
  for (const auto& c : curves) {
    for (double t : {0.3, 1.1, 2.7, 4.9}) {
      CHECK(c.derivative(t) ==
            doctest::Approx(central_diff(c, t)).epsilon(1e-5));
    }
  }
}

TEST_CASE("logistic and richards stay finite far from the midpoint") {
  auto logistic = curve_of(CurveFamily::Logistic, {10, 5.0, 0.0});
  CHECK(logistic.value(-200) == doctest::Approx(0.0));
  CHECK(logistic.value(200) == doctest::Approx(10.0));
  CHECK(std::isfinite(logistic.derivative(-200)));
  auto richards = curve_of(CurveFamily::GeneralizedRichards, {10, 2.0, 5.0, 0.0, 0.7});
  CHECK(std::isfinite(richards.value(-500)));
  CHECK(richards.value(-500) == doctest::Approx(0.0));
  CHECK(richards.value(500) == doctest::Approx(10.0));
}

TEST_CASE("linear and polynomial expose exact antiderivatives") {
  auto lin = make_linear(2.0, 3.0);
  CHECK(lin.has_antiderivative());
  // Integral of 2 + 3t over [1, 4] is 2*3 + 1.5*(16-1) = 28.5.
  CHECK(lin.antiderivative(4.0) - lin.antiderivative(1.0) ==
        doctest::Approx(28.5).epsilon(1e-14));

  auto poly = make_polynomial(std::vector<double>{0.0, 0.0, 0.2});
  // Integral of 0.2 t^2 over [0, 10] is 0.2 * 1000 / 3.
  CHECK(poly.antiderivative(10.0) - poly.antiderivative(0.0) ==
        doctest::Approx(0.2 * 1000.0 / 3.0).epsilon(1e-12));

  auto logistic = curve_of(CurveFamily::Logistic, {10, 0.8, 2.0});
  CHECK_FALSE(logistic.has_antiderivative());
  CHECK_THROWS_AS(logistic.antiderivative(1.0), DataError);
}

TEST_CASE("make_polynomial keeps the natural basis and degree") {
  auto p = make_polynomial(std::vector<double>{1.0, 2.0, 3.0});
  CHECK(p.polynomial_degree() == 2);
  CHECK(p.value(2.0) == doctest::Approx(1 + 4 + 12).epsilon(1e-14));
  CHECK_THROWS_AS(make_polynomial(std::vector<double>{}), DataError);
}

TEST_CASE("scaled polynomial basis evaluates through shift and scale") {
  Curve p;
  p.family = CurveFamily::Polynomial;
  p.params = {1.0, 0.0, 2.0};  // 1 + 2u^2 with u = (t - 3) / 2
  p.shift = 3.0;
  p.scale = 2.0;
  CHECK(p.value(5.0) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(p.derivative(5.0) == doctest::Approx(2.0 * 2.0 * 1.0 / 2.0).epsilon(1e-12));
  const double lhs = p.antiderivative(5.0) - p.antiderivative(1.0);
  // Substitute u = (t-3)/2: integral over t in [1,5] of 1 + 2u^2 equals
  // 2 * integral over u in [-1,1] = 2 * (2 + 4/3).
  CHECK(lhs == doctest::Approx(2 * (2 + 4.0 / 3.0)).epsilon(1e-12));
}
