#include "crofton/bodies.hpp"
#include "crofton/errors.hpp"

#include <doctest.h>

#include <cmath>

using namespace crofton;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

}  // namespace

TEST_CASE("box face lattice") {
  const Polytope cube = Polytope::box(vec({0, 0, 0}), vec({1, 1, 1}));
  CHECK(cube.vertices().size() == 8);
  CHECK(cube.faces_of_dim(0).size() == 8);
  CHECK(cube.faces_of_dim(1).size() == 12);
  CHECK(cube.faces_of_dim(2).size() == 6);
  CHECK(cube.halfspaces().size() == 6);
  for (const FaceData* v : cube.faces_of_dim(0)) CHECK(v->cone.cols() == 3);
  const Polytope hull = Polytope::from_vertices({vec({0, 0, 0}), vec({1, 0, 0}), vec({0, 1, 0}),
                                                 vec({0, 0, 1}), vec({0.1, 0.1, 0.1})});
  CHECK(hull.vertices().size() == 4);
  CHECK(hull.faces_of_dim(2).size() == 4);
}

TEST_CASE("plane sections of the cube match a brute-force edge clip") {
  const Polytope cube = Polytope::box(vec({0, 0, 0}), vec({1, 1, 1}));
  const ConvexBody body(cube);
  Rng rng(31, 0);
  int checked = 0;
  for (int i = 0; i < 100; ++i) {
    const LinearFlat l = sample_linear(3, 2, rng);
    const Vector n = l.complement().col(0);
    const double h = -0.2 + 2.0 * rng.uniform();  // the cube spans <n,x> in a range inside [-1.8, 1.8]
    const AffineFlat e(l, h * n);
    int crossings = 0;
    for (const FaceData* edge : cube.faces_of_dim(1)) {
      const double a = n.dot(cube.vertices()[edge->vertices[0]]) - h;
      const double b = n.dot(cube.vertices()[edge->vertices[1]]) - h;
      if (a * b < 0.0) ++crossings;
    }
    const Section s = section(body, e);
    if (crossings == 0) {
      CHECK(s.status != SectionStatus::ok);
      continue;
    }
    REQUIRE(s.status == SectionStatus::ok);
    REQUIRE(s.body->polytope() != nullptr);
    CHECK(static_cast<int>(s.body->polytope()->vertices().size()) == crossings);
    for (const Vector& u : s.body->polytope()->vertices()) {
      const Vector x = e.to_ambient(u);
      CHECK(x.minCoeff() >= -1e-12);
      CHECK(x.maxCoeff() <= 1.0 + 1e-12);
    }
    ++checked;
  }
  CHECK(checked > 40);
}

TEST_CASE("sections of smooth bodies") {
  const ConvexBody ball(Ball{vec({0.3, 0.0, 0.1}), 1.0});
  const LinearFlat xy = LinearFlat::from_spanning(Matrix::Identity(3, 2));
  const Section s = section(ball, AffineFlat(xy, vec({0, 0, 0.6})));
  REQUIRE(s.status == SectionStatus::ok);
  REQUIRE(s.body->ball() != nullptr);
  CHECK(s.body->ball()->radius == doctest::Approx(std::sqrt(1.0 - 0.25)));
  CHECK(s.body->ball()->center[0] == doctest::Approx(0.3));
  CHECK(section(ball, AffineFlat(xy, vec({0, 0, 1.1}))).status == SectionStatus::tangential);
  CHECK(section(ball, AffineFlat(xy, vec({0, 0, 1.5}))).status == SectionStatus::empty);

  Ellipsoid el{vec({0, 0, 0}), vec({1, 1, 2}), Matrix::Identity(3, 3)};
  const ConvexBody ellipsoid(el);
  const Section t = section(ellipsoid, AffineFlat(xy, vec({0, 0, 1.0})));
  REQUIRE(t.status == SectionStatus::ok);
  const Ellipsoid se = t.body->as_ellipsoid();
  CHECK(se.semiaxes.prod() == doctest::Approx(0.75));
}

TEST_CASE("rotational validation") {
  CHECK_THROWS_AS(validate_rotational(ConvexBody(Polytope::box(vec({0, 0, 0}), vec({1, 1, 1})))),
                  OriginOnBoundaryError);
  CHECK_THROWS_AS(validate_rotational(ConvexBody(Polytope::box(vec({0, 0}), vec({1, 1})))),
                  OriginOnBoundaryError);
  CHECK(validate_rotational(ConvexBody(Polytope::box(vec({0.1, 0.1, 0.1}), vec({1.1, 1.1, 1.1})))) ==
        doctest::Approx(std::sqrt(0.03)).epsilon(1e-9));
  CHECK_THROWS_AS(validate_rotational(ConvexBody(Ball{vec({1.0, 0, 0}), 1.0})), OriginOnBoundaryError);
  CHECK(validate_rotational(ConvexBody(Ball{vec({0.3, 0.0, 0.1}), 1.0})) > 0.5);
}

TEST_CASE("body JSON") {
  const ConvexBody cube(Polytope::box(vec({0.1, 0.1, 0.1}), vec({1.1, 1.1, 1.1})));
  const ConvexBody back = ConvexBody::from_json(cube.to_json());
  CHECK(back.kind() == BodyKind::polytope);
  CHECK(back.polytope()->vertices().size() == 8);
  const ConvexBody e = ConvexBody::from_json(
      R"({"type": "ellipsoid", "center": [0.3, 0, 0.1], "semiaxes": [1, 1, 2]})");
  CHECK(e.kind() == BodyKind::ellipsoid);
  CHECK(ConvexBody::from_json(e.to_json()).ellipsoid()->semiaxes[2] == doctest::Approx(2.0));
  CHECK_THROWS_AS(ConvexBody::from_json(R"({"type": "torus"})"), DomainError);
  CHECK_THROWS_AS(ConvexBody::from_json(R"({"type": "ball", "center": [0, 0], "radius": -1})"), DomainError);
  CHECK_THROWS_AS(ConvexBody::from_json("not json"), DomainError);
  CHECK_THROWS_AS(ConvexBody::load("/nonexistent/body.json"), DomainError);
}

TEST_CASE("enclosing ball and boundary cubature") {
  const ConvexBody ball(Ball{vec({0.3, 0.0, 0.1}), 1.0});
  const auto nodes = boundary_cubature(ball, 32);
  double area = 0.0;
  for (const auto& n : nodes) area += n.weight;
  CHECK(area == doctest::Approx(4.0 * M_PI).epsilon(1e-12));
  const ConvexBody cube(Polytope::box(vec({0, 0, 0}), vec({1, 1, 1})));
  const EnclosingBall eb = circumball(cube);
  CHECK(eb.radius >= std::sqrt(3.0) / 2 - 1e-12);
  double facet_area = 0.0;
  for (const auto& n : facet_cubature(*cube.polytope(), 4, 1)) facet_area += n.weight;
  CHECK(facet_area == doctest::Approx(6.0));
}
