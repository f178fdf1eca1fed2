#include "crofton/errors.hpp"
#include "crofton/specfun.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace crofton;

namespace {

void check_rel(double value, double reference, double tol) {
  CHECK(std::abs(value - reference) <= tol * std::max(1.0, std::abs(reference)));
}

}  // namespace

TEST_CASE("sphere areas, ball volumes and Grassmannian masses") {
  CHECK(sphere_area(1) == doctest::Approx(2.0));
  CHECK(sphere_area(2) == doctest::Approx(2.0 * std::numbers::pi));
  CHECK(sphere_area(3) == doctest::Approx(4.0 * std::numbers::pi));
  CHECK(ball_volume(3) == doctest::Approx(4.0 * std::numbers::pi / 3.0));
  for (int k = 1; k <= 10; ++k) check_rel(sphere_area(k), oracle::sigma(k), 1e-13);
  for (int d = 2; d <= 8; ++d)
    for (int j = 0; j <= d; ++j) check_rel(grassmann_total(d, j), oracle::grassmann_mass(d, j), 1e-12);
  // The Grassmannian of lines in R^3 has mass sigma_3 / sigma_1 = 2 pi.
  CHECK(grassmann_total(3, 1) == doctest::Approx(2.0 * std::numbers::pi));
}

TEST_CASE("gamma helpers") {
  CHECK(pochhammer(0.5, 3) == doctest::Approx(0.5 * 1.5 * 2.5));
  CHECK(pochhammer(-2.0, 3) == doctest::Approx(0.0));
  CHECK(gamma_ratio({5.0}, {3.0}) == doctest::Approx(12.0));
  CHECK(gamma_ratio({2.5}, {-1.0}) == 0.0);
  CHECK_THROWS_AS(gamma_ratio({-2.0}, {1.0}), DomainError);
  CHECK(reciprocal_gamma(-3.0) == 0.0);
  CHECK(digamma(1.0) == doctest::Approx(-0.5772156649015329));
}

TEST_CASE("terminating and convergent hypergeometric series") {
  // 2F1(-2, b; c; z) is a quadratic polynomial.
  const double b = 1.5, c = 2.5, z = 0.3;
  const double poly = 1.0 - 2.0 * b / c * z + b * (b + 1.0) / (c * (c + 1.0)) * z * z;
  CHECK(hyp_pfq({{-2.0, b}, {c}}, z) == doctest::Approx(poly).epsilon(1e-14));
  // Lower parameter -3 with upper -2: terminates before the pole.
  CHECK(std::isfinite(hyp_pfq({{-2.0, 1.0}, {-3.0}}, 0.5)));
  // Equal non-positive upper and lower parameters are summed up to n = -a.
  CHECK(hyp_pfq({{-2.0, 1.0}, {-2.0}}, 0.5) == doctest::Approx(1.0 + 0.5 + 0.25));
  // Lower pole without a terminating upper parameter.
  CHECK_THROWS_AS(hyp_pfq({{1.0, 1.0}, {-2.0}}, 0.5), DomainError);
  CHECK_THROWS_AS(hyp_pfq({{0.5, 1.0, 1.0}, {2.0}}, 0.5), DomainError);
  CHECK_THROWS_AS(hyp2f1(1.0, 1.0, 1.5, 1.2), DomainError);
  // Elementary closed forms.
  CHECK(hyp2f1(1.0, 1.0, 2.0, 0.5) == doctest::Approx(-std::log(0.5) / 0.5).epsilon(1e-13));
  CHECK(hyp2f1(0.5, 1.0, 1.5, 0.25) == doctest::Approx(std::atanh(0.5) / 0.5).epsilon(1e-13));
  // Near z = 1 the connection formulas take over.
  CHECK(hyp2f1(0.5, 1.0, 1.5, 0.98) ==
        doctest::Approx(std::atanh(std::sqrt(0.98)) / std::sqrt(0.98)).epsilon(1e-12));
  CHECK(hyp2f1(1.0, 1.0, 2.0, 0.99) == doctest::Approx(-std::log(0.01) / 0.99).epsilon(1e-12));
  // 1F0 and 0F1.
  CHECK(hyp_pfq({{2.0}, {}}, 0.2) == doctest::Approx(std::pow(0.8, -2.0)));
  CHECK(hyp_pfq({{}, {0.5}}, 0.25) == doctest::Approx(std::cosh(1.0)));
}

TEST_CASE("Gauss theorem against the series") {
  for (double a : {0.5, 1.0, -0.5, 1.25})
    for (double b : {0.25, 1.5})
      for (double c : {5.0, 6.5}) {
        check_rel(gauss_at_one(a, b, c), oracle::gauss_series_at_one(a, b, c), 1e-8);
        check_rel(hyp2f1(a, b, c, 1.0), gauss_at_one(a, b, c), 1e-12);
      }
  CHECK_THROWS_AS(gauss_at_one(1.0, 1.0, 1.5), DomainError);
}

TEST_CASE("F against its defining integral") {
  for (int d : {3, 4, 5})
    for (int j = 2; j < d; ++j)
      for (int s : {0, 1, 2, 3})
        for (int l : {0, 1})
          for (int b : {0, 1, 2})
            for (double m : {0.0, 0.2, 0.55, 0.9})
              check_rel(f_integral(d, j, s, l, b, m), oracle::f_integral(d, j, s, l, b, m), 1e-8);
  CHECK_THROWS_AS(f_integral(3, 3, 0, 0, 0, 0.5), DomainError);
  CHECK_THROWS_AS(f_integral(3, 2, 0, 0, 0, 1.5), DomainError);
}

TEST_CASE("elliptic integrals and the elliptic forms of F") {
  CHECK(elliptic_k(0.0) == doctest::Approx(std::numbers::pi / 2));
  CHECK(elliptic_e(0.0) == doctest::Approx(std::numbers::pi / 2));
  for (int i = 1; i <= 9; ++i) {
    const double m = 0.1 * i;
    check_rel(elliptic_k(m), oracle::elliptic_k(m), 1e-12);
    check_rel(elliptic_e(m), oracle::elliptic_e(m), 1e-12);
    check_rel(f_integral(3, 2, 2, 0, 0, m), oracle::f_elliptic(0, 0, m), 1e-8);
    check_rel(f_integral(3, 2, 2, 0, 1, m), oracle::f_elliptic(0, 1, m), 1e-8);
    check_rel(f_integral(3, 2, 2, 1, 0, m), oracle::f_elliptic(1, 0, m), 1e-8);
    check_rel(f_integral(3, 2, 2, 0, 2, m), oracle::f_elliptic(0, 2, m), 1e-8);
  }
}

TEST_CASE("affine constants and chi representations") {
  for (int d = 2; d <= 6; ++d)
    for (int j = 1; j < d; ++j)
      for (int k = 0; k < j; ++k) {
        CHECK(c_affine(d, j, k) > 0.0);
        for (int s = 0; s <= 4; ++s)
          for (int p = 0; 2 * p <= s; ++p) {
            const ChiForms f = chi_forms(d, j, k, s, p);
            const double scale = std::max(1.0, std::abs(f.finite_sum));
            CHECK(std::abs(f.finite_sum - f.pochhammer_sum) <= 1e-10 * scale);
            CHECK(std::abs(f.finite_sum - f.hypergeometric) <= 1e-10 * scale);
          }
        CHECK(chi_constant(d, j, k, 2, 2) == 0.0);
      }
}

TEST_CASE("Legendre polynomials and the a constants") {
  for (int d : {3, 4, 5})
    for (int s = 0; s <= 4; ++s) {
      CHECK(legendre_pd(s, d, 1.0) == doctest::Approx(1.0));
      for (double t : {-0.7, 0.1, 0.6}) CHECK(legendre_pd(s, d, t) == doctest::Approx(oracle::legendre_pd(s, d, t)));
      for (int j = 1; j < d; ++j) {
        check_rel(a_constant(s, j, d), oracle::a_constant(s, j, d), 1e-8);
        check_rel(a_constant_quadrature(s, j, d), oracle::a_constant(s, j, d), 1e-8);
      }
    }
  // P_2^3 is the ordinary Legendre polynomial.
  CHECK(legendre_pd(2, 3, 0.5) == doctest::Approx(0.5 * (3 * 0.25 - 1)));
}
