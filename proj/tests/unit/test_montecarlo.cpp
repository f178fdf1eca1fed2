#include "crofton/errors.hpp"
#include "crofton/montecarlo.hpp"
#include "crofton/specfun.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <numbers>

using namespace crofton;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

EstimatorConfig config(long n, std::uint64_t seed, int workers) {
  EstimatorConfig cfg;
  cfg.samples = n;
  cfg.seed = seed;
  cfg.workers = workers;
  return cfg;
}

}  // namespace

TEST_CASE("zero-variance estimators") {
  // Every line and plane through an interior origin meets the ball with
  // Euler characteristic 1.
  const ConvexBody ball(Ball{vec({0.3, 0.0, 0.1}), 1.0});
  const Estimate lines = estimate_rot_lhs(ball, 1, Functional::phi(0, 0, 0), config(2000, 1, 2));
  CHECK(lines.mean.value() == doctest::Approx(grassmann_total(3, 1)));
  CHECK(lines.se.value() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(lines.empty == 0);
  const Estimate planes = estimate_rot_lhs(ball, 2, Functional::phi(0, 0, 0), config(2000, 1, 2));
  CHECK(planes.mean.value() == doctest::Approx(grassmann_total(3, 2)));
}

TEST_CASE("standard error scales like 1/sqrt(N)") {
  const ConvexBody cube(Polytope::box(vec({0, 0, 0}), vec({1, 1, 1})));
  const Functional euler = Functional::phi(0, 0, 0);
  const Estimate a = estimate_aff_lhs(cube, 1, euler, config(4000, 3, 4));
  const Estimate b = estimate_aff_lhs(cube, 1, euler, config(64000, 3, 4));
  CHECK(a.se.value() / b.se.value() == doctest::Approx(4.0).epsilon(0.2));
  CHECK(a.samples == 4000);
  CHECK(b.samples == 64000);
  CHECK(a.empty > 0);
}

TEST_CASE("results do not depend on the number of workers") {
  const ConvexBody e(Ellipsoid{vec({0.3, 0, 0.1}), vec({1, 1, 2}), Matrix::Identity(3, 3)});
  const Functional f = Functional::phi(1, 1, 1, 16);
  const Estimate one = estimate_aff_lhs(e, 2, f, config(3000, 9, 1));
  const Estimate eight = estimate_aff_lhs(e, 2, f, config(3000, 9, 8));
  const Estimate again = estimate_aff_lhs(e, 2, f, config(3000, 9, 3));
  for (std::size_t i = 0; i < one.mean.size(); ++i) {
    CHECK(one.mean[i] == eight.mean[i]);
    CHECK(one.se[i] == eight.se[i]);
    CHECK(one.mean[i] == again.mean[i]);
  }
  const Estimate other = estimate_aff_lhs(e, 2, f, config(3000, 10, 1));
  CHECK(other.mean[0] != one.mean[0]);
}

TEST_CASE("experiment specs") {
  const ExperimentSpec spec = ExperimentSpec::from_json(
      R"({"name": "x", "route": "aff-minkowski", "j": 2, "k": 1, "r": 1, "s": 2,
          "variant": "r0", "n_samples": 500, "seed": 4, "ci": 2.5, "max_rel_err": 0.02,
          "psi": {"type": "norm_power", "param": 2}})");
  CHECK(spec.j == 2);
  CHECK(spec.samples == 500);
  CHECK(spec.variant == "r0");
  CHECK(spec.psi == "norm_power");
  CHECK(spec.psi_param == 2.0);
  const ExperimentSpec back = ExperimentSpec::from_json(spec.to_json());
  CHECK(back.to_json() == spec.to_json());
  CHECK_THROWS_AS(ExperimentSpec::from_json(R"({"name": "x", "route": "aff-minkowski", "n_samples": 10})"),
                  DomainError);
  CHECK_THROWS_AS(ExperimentSpec::from_json(R"({"name": "x", "route": "rot-lines", "ci": 0})"), DomainError);
  CHECK(is_rotational("rot-lines"));
  CHECK_FALSE(is_rotational("aff-psi"));
}

TEST_CASE("verification reports") {
  const ConvexBody ball(Ball{vec({0.3, 0.0, 0.1}), 1.0});
  ExperimentSpec spec;
  spec.name = "lines";
  spec.route = "rot-lines";
  spec.j = 1;
  spec.r = 1;
  spec.samples = 2000;
  spec.seed = 5;
  const VerificationReport rep = verify(ball, spec, 2);
  CHECK(rep.status == "ok");
  CHECK(rep.pass);
  CHECK(rep.z.size() == 3);
  const auto j = nlohmann::json::parse(rep.to_json());
  CHECK(j["schema"] == "crofton-report/1");
  CHECK(j["coordinates"].size() == 3);
  CHECK(j["pass"] == true);
  CHECK_FALSE(j.contains("runtime_s"));
  CHECK(verify(ball, spec, 1).to_json() == rep.to_json());

  // Rotational route on a body with a vertex at the origin: reported, not thrown.
  const ConvexBody corner(Polytope::box(vec({0, 0, 0}), vec({1, 1, 1})));
  const VerificationReport bad = verify(corner, spec, 1);
  CHECK(bad.status != "ok");
  CHECK(bad.error_type == "origin_on_boundary");
  CHECK_FALSE(bad.pass);

  ExperimentSpec unsupported = spec;
  unsupported.route = "rot-hyper";
  unsupported.j = 2;
  unsupported.r = 0;
  const ConvexBody cube(Polytope::box(vec({0.1, 0.1, 0.1}), vec({1.1, 1.1, 1.1})));
  CHECK(verify(cube, unsupported, 1).error_type == "unsupported");
  ExperimentSpec unknown = spec;
  unknown.route = "rot-nope";
  CHECK(verify(ball, unknown, 1).error_type == "domain");

  // An impossible tolerance fails but keeps the numbers. (On the ball itself
  // the classical route has zero variance, so use the cube.)
  ExperimentSpec strict = spec;
  strict.route = "aff-classical";
  strict.r = 0;
  strict.ci = 1e-9;
  strict.atol = 1e-12;
  const VerificationReport tight = verify(cube, strict, 2);
  CHECK(tight.status == "ok");
  CHECK_FALSE(tight.pass);
  CHECK(tight.lhs.has_value());
  CHECK(tight.rhs.has_value());
}

TEST_CASE("worker default honours the environment") {
  CHECK(default_workers() >= 1);
}
