#include "crofton/errors.hpp"
#include "crofton/minkowski.hpp"
#include "crofton/specfun.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <Eigen/Geometry>

#include <cmath>
#include <numbers>

using namespace crofton;

namespace {

constexpr double kPi = std::numbers::pi;

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

Matrix rotation() {
  return Eigen::AngleAxisd(0.7, vec({1, 2, 3}).normalized()).toRotationMatrix();
}

/// T(u, ..., u) for a handful of directions; two tensors agree as forms iff
/// their polynomials agree on enough points, checked here on 12 of them.
void check_polynomials(const SymTensor& a, const std::function<double(const Vector&)>& b, double tol) {
  Rng rng(41, 0);
  for (int i = 0; i < 12; ++i) {
    Vector u(a.dim());
    for (int c = 0; c < a.dim(); ++c) u[c] = rng.normal();
    CHECK(std::abs(a.evaluate_power(u) - b(u)) <= tol);
  }
}

}  // namespace

TEST_CASE("intrinsic volumes") {
  const ConvexBody cube(Polytope::box(vec({0, 0, 0}), vec({1, 1, 1})));
  const double cube_v[] = {1, 3, 3, 1};
  for (int k = 0; k <= 3; ++k) CHECK(phi(cube, k, 0, 0).value() == doctest::Approx(cube_v[k]).epsilon(1e-12));

  const ConvexBody simplex(Polytope::from_vertices({vec({0, 0, 0}), vec({1, 0, 0}), vec({0, 1, 0}), vec({0, 0, 1})}));
  CHECK(phi(simplex, 3, 0, 0).value() == doctest::Approx(1.0 / 6.0));
  CHECK(phi(simplex, 2, 0, 0).value() == doctest::Approx((1.5 + std::sqrt(3.0) / 2.0) / 2.0));
  CHECK(phi(simplex, 0, 0, 0).value() == doctest::Approx(1.0));

  const ConvexBody ball(Ball{vec({0.3, 0.0, 0.1}), 1.0});
  const double ball_v[] = {1.0, 4.0, 2.0 * kPi, 4.0 * kPi / 3.0};
  for (int k = 0; k <= 3; ++k) CHECK(phi(ball, k, 0, 0).value() == doctest::Approx(ball_v[k]).epsilon(1e-10));

  const ConvexBody square(Polytope::box(vec({0, 0}), vec({2, 1})));
  CHECK(phi(square, 0, 0, 0).value() == doctest::Approx(1.0));
  CHECK(phi(square, 1, 0, 0).value() == doctest::Approx(3.0));
  CHECK(phi(square, 2, 0, 0).value() == doctest::Approx(2.0));
}

TEST_CASE("ball tensors are multiples of the metric") {
  // Phi_k^{0,2}(B^3) = sigma_{3-k} / (2 sigma_{5-k}) V_k (1/3) Q by the
  // isotropy of the uniform measure on the sphere.
  const ConvexBody ball(Ball{vec({0, 0, 0}), 1.0});
  const double v[] = {1.0, 4.0, 2.0 * kPi};
  for (int k = 0; k <= 2; ++k) {
    const double c = oracle::sigma(3 - k) / (2.0 * oracle::sigma(5 - k)) * v[k] / 3.0;
    check_polynomials(phi(ball, k, 0, 2), [&](const Vector& u) { return c * u.squaredNorm(); }, 1e-10);
  }
  // Centroid: Phi_3^{1,0} of the unit cube.
  const ConvexBody cube(Polytope::box(vec({0, 0, 0}), vec({1, 1, 1})));
  CHECK((phi(cube, 3, 1, 0).to_vector() - vec({0.5, 0.5, 0.5})).norm() < 1e-12);
  // Minkowski relation: the surface normals integrate to zero.
  CHECK(phi(cube, 2, 0, 1).max_abs() < 1e-12);
  CHECK(phi(ConvexBody(Ellipsoid{vec({0.3, 0, 0.1}), vec({1, 1, 2}), rotation()}), 2, 0, 1).max_abs() < 1e-9);
}

TEST_CASE("rotation covariance and translation invariance") {
  const Matrix rot = rotation();
  const Vector shift = vec({0.2, -0.4, 0.3});
  const ConvexBody bodies[] = {
      ConvexBody(Polytope::box(vec({0.1, 0.1, 0.1}), vec({1.1, 1.3, 0.6}))),
      ConvexBody(Ellipsoid{vec({0.3, 0, 0.1}), vec({1, 1.5, 2}), Matrix::Identity(3, 3)}),
  };
  for (const ConvexBody& body : bodies) {
    const ConvexBody rotated = transform(body, rot, Vector::Zero(3));
    const ConvexBody moved = transform(body, Matrix::Identity(3, 3), shift);
    for (int k = 0; k <= 2; ++k)
      for (auto [r, s] : std::vector<std::pair<int, int>>{{0, 2}, {1, 1}, {2, 0}, {0, 3}, {1, 2}}) {
        const SymTensor a = phi(body, k, r, s);
        const SymTensor b = phi(rotated, k, r, s);
        check_polynomials(b, [&](const Vector& u) { return a.evaluate_power(rot.transpose() * u); },
                          1e-8 * std::max(1.0, a.max_abs()));
        if (r == 0) CHECK(approx_equal(phi(moved, k, 0, s), a, 1e-9, 1e-9));
      }
  }
}

TEST_CASE("homogeneity") {
  const ConvexBody e(Ellipsoid{vec({0.3, 0, 0.1}), vec({1, 1, 2}), Matrix::Identity(3, 3)});
  const double lambda = 1.7;
  const ConvexBody big(Ellipsoid{lambda * vec({0.3, 0, 0.1}), lambda * vec({1, 1, 2}), Matrix::Identity(3, 3)});
  for (int k = 0; k <= 2; ++k)
    for (auto [r, s] : std::vector<std::pair<int, int>>{{0, 0}, {1, 0}, {1, 1}, {0, 2}, {2, 1}})
      CHECK(approx_equal(phi(big, k, r, s), std::pow(lambda, k + r) * phi(e, k, r, s), 1e-9, 1e-9));
}

TEST_CASE("valuation property on a split box") {
  // [0,2] x [0,1]^2 = A ∪ B with A ∩ B the square {1} x [0,1]^2, which is
  // approximated by a box of thickness 1e-7.
  const ConvexBody whole(Polytope::box(vec({0, 0, 0}), vec({2, 1, 1})));
  const ConvexBody a(Polytope::box(vec({0, 0, 0}), vec({1, 1, 1})));
  const ConvexBody b(Polytope::box(vec({1, 0, 0}), vec({2, 1, 1})));
  const ConvexBody cut(Polytope::box(vec({1, 0, 0}), vec({1 + 1e-7, 1, 1})));
  for (int k = 0; k <= 2; ++k)
    for (auto [r, s] : std::vector<std::pair<int, int>>{{0, 0}, {1, 0}, {0, 2}, {2, 0}, {1, 2}}) {
      const SymTensor lhs = phi(whole, k, r, s) + phi(cut, k, r, s);
      const SymTensor rhs = phi(a, k, r, s) + phi(b, k, r, s);
      CHECK(approx_equal(lhs, rhs, 1e-6, 1e-6));
    }
}

TEST_CASE("harmonic basis is trace free and reproduces Legendre polynomials") {
  Rng rng(42, 0);
  for (int d : {3, 4})
    for (int s = 0; s <= 4; ++s) {
      Vector u(d), v(d);
      for (int i = 0; i < d; ++i) {
        u[i] = rng.normal();
        v[i] = rng.normal();
      }
      u.normalize();
      v.normalize();
      const SymTensor h = harmonic_basis(d, s, u);
      if (s >= 2) CHECK(contract(h, metric_tensor(d)).max_abs() < 1e-12 * std::max(1.0, h.max_abs()));
      const double at_u = h.evaluate_power(u);
      REQUIRE(std::abs(at_u) > 1e-12);
      CHECK(h.evaluate_power(v) / at_u == doctest::Approx(oracle::legendre_pd(s, d, u.dot(v))).epsilon(1e-10));
    }
}

TEST_CASE("harmonic tensors and generalized tensors") {
  const ConvexBody ball(Ball{vec({0, 0, 0}), 1.0});
  // Harmonic tensors of the centered ball vanish for s >= 1.
  for (int s = 1; s <= 3; ++s) CHECK(xi(ball, 1, 0, s).max_abs() < 1e-10);
  const ConvexBody e(Ellipsoid{vec({0.3, 0, 0.1}), vec({1, 1, 2}), Matrix::Identity(3, 3)});
  CHECK(xi(e, 1, 0, 2).max_abs() > 1e-3);
  for (const ConvexBody* body : {&ball, &e})
    for (int k = 1; k <= 2; ++k)
      for (int r = 0; r <= 2; ++r)
        for (int s = 2; r + s <= 4; ++s)
          for (const IdentityResidual& res : check_prop21(*body, k, r, s))
            CHECK(res.residual.max_abs() < 1e-8 * std::max(1.0, res.lhs.max_abs()));
  CHECK_THROWS_AS(check_prop21(ConvexBody(Polytope::box(vec({0, 0, 0}), vec({1, 1, 1}))), 1, 0, 2),
                  UnsupportedError);
  CHECK_THROWS_AS(phi(ball, 3, 0, 1), DomainError);
}
