#include "crofton/bodies.hpp"

#include "crofton/errors.hpp"
#include "crofton/quadrature.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace crofton {
namespace detail {
Section polytope_section(const Polytope& polytope, const AffineFlat& flat);
}

namespace {

using nlohmann::json;

constexpr double kTangentTol = 1e-9;

Vector vec_from_json(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json vec_to_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

void check_ellipsoid(const Ellipsoid& e) {
  const auto d = e.center.size();
  if (d < 1) throw DomainError("ellipsoid: empty center");
  if (e.semiaxes.size() != d || e.orientation.rows() != d || e.orientation.cols() != d)
    throw DomainError("ellipsoid: dimension mismatch");
  if (!(e.semiaxes.minCoeff() > 0.0)) throw DomainError("ellipsoid: semiaxes must be positive");
  const double err =
      (e.orientation.transpose() * e.orientation - Matrix::Identity(d, d)).cwiseAbs().maxCoeff();
  if (err > 1e-10) throw DomainError("ellipsoid: orientation is not orthonormal");
}

/// Shape matrix M with X = {x : (x-c)^T M (x-c) <= 1}.
Matrix shape_matrix(const Ellipsoid& e) {
  return e.orientation * e.semiaxes.cwiseInverse().cwiseAbs2().asDiagonal() *
         e.orientation.transpose();
}

/// Ellipsoid from center and shape matrix; a multiple of the identity gives
/// a ball.
ConvexBody quadric_body(const Vector& center, const Matrix& m) {
  const auto d = center.size();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
  const Vector lambda = eig.eigenvalues();
  if (lambda.maxCoeff() - lambda.minCoeff() <= 1e-13 * lambda.maxCoeff())
    return ConvexBody(Ball{center, 1.0 / std::sqrt(lambda.mean())});
  Matrix frame = eig.eigenvectors();
  if (frame.determinant() < 0.0) frame.col(d - 1) *= -1.0;
  return ConvexBody(Ellipsoid{center, lambda.cwiseSqrt().cwiseInverse(), frame});
}

Matrix tangent_frame(const Vector& n) {
  if (n.size() == 1) return Matrix(1, 0);
  return LinearFlat(Matrix(n)).complement();
}

}  // namespace

ConvexBody::ConvexBody(Ball ball) : shape_(std::move(ball)) {
  const Ball& b = std::get<Ball>(shape_);
  dim_ = static_cast<int>(b.center.size());
  if (dim_ < 1) throw DomainError("ball: empty center");
  if (!(b.radius > 0.0)) throw DomainError("ball: radius must be positive");
}

ConvexBody::ConvexBody(Ellipsoid ellipsoid) : shape_(std::move(ellipsoid)) {
  const Ellipsoid& e = std::get<Ellipsoid>(shape_);
  check_ellipsoid(e);
  dim_ = static_cast<int>(e.center.size());
}

ConvexBody::ConvexBody(Polytope polytope) : shape_(std::move(polytope)) {
  dim_ = std::get<Polytope>(shape_).dim();
}

BodyKind ConvexBody::kind() const {
  return static_cast<BodyKind>(shape_.index());
}

std::string ConvexBody::kind_name() const {
  switch (kind()) {
    case BodyKind::ball: return "ball";
    case BodyKind::ellipsoid: return "ellipsoid";
    case BodyKind::polytope: return "polytope";
  }
  return "unknown";
}

Ellipsoid ConvexBody::as_ellipsoid() const {
  if (const Ball* b = ball())
    return {b->center, Vector::Constant(dim_, b->radius), Matrix::Identity(dim_, dim_)};
  if (const Ellipsoid* e = ellipsoid()) return *e;
  throw UnsupportedError("as_ellipsoid: body is a polytope");
}

std::string ConvexBody::to_json() const {
  json j;
  j["type"] = kind_name();
  if (const Ball* b = ball()) {
    j["center"] = vec_to_json(b->center);
    j["radius"] = b->radius;
  } else if (const Ellipsoid* e = ellipsoid()) {
    j["center"] = vec_to_json(e->center);
    j["semiaxes"] = vec_to_json(e->semiaxes);
    json axes = json::array();
    for (Eigen::Index c = 0; c < e->orientation.cols(); ++c)
      axes.push_back(vec_to_json(e->orientation.col(c)));
    j["axes"] = axes;
  } else {
    json verts = json::array();
    for (const auto& v : polytope()->vertices()) verts.push_back(vec_to_json(v));
    j["vertices"] = verts;
    json hs = json::array();
    for (const auto& h : polytope()->halfspaces())
      hs.push_back({{"normal", vec_to_json(h.normal)}, {"offset", h.offset}});
    j["halfspaces"] = hs;
  }
  return j.dump();
}

ConvexBody ConvexBody::from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DomainError(std::string("body specification: ") + e.what());
  }
  try {
    const std::string type = j.at("type").get<std::string>();
    if (type == "ball") return ConvexBody(Ball{vec_from_json(j.at("center")), j.at("radius").get<double>()});
    if (type == "ellipsoid") {
      Ellipsoid e;
      e.center = vec_from_json(j.at("center"));
      e.semiaxes = vec_from_json(j.at("semiaxes"));
      const auto d = e.center.size();
      e.orientation = Matrix::Identity(d, d);
      if (j.contains("axes")) {
        const auto& axes = j.at("axes");
        if (static_cast<Eigen::Index>(axes.size()) != d)
          throw DomainError("ellipsoid: need one axis per dimension");
        for (Eigen::Index c = 0; c < d; ++c) {
          const Vector a = vec_from_json(axes.at(c));
          if (a.size() != d) throw DomainError("ellipsoid: axis dimension mismatch");
          e.orientation.col(c) = a.normalized();
        }
      }
      return ConvexBody(std::move(e));
    }
    if (type == "polytope" || type == "box") {
      if (j.contains("lo") || type == "box")
        return ConvexBody(Polytope::box(vec_from_json(j.at("lo")), vec_from_json(j.at("hi"))));
      if (j.contains("vertices")) {
        std::vector<Vector> verts;
        for (const auto& v : j.at("vertices")) verts.push_back(vec_from_json(v));
        return ConvexBody(Polytope::from_vertices(verts));
      }
      std::vector<Halfspace> hs;
      for (const auto& h : j.at("halfspaces"))
        hs.push_back({vec_from_json(h.at("normal")), h.at("offset").get<double>()});
      return ConvexBody(Polytope::from_halfspaces(hs));
    }
    throw DomainError("body specification: unknown type '" + type + "'");
  } catch (const json::exception& e) {
    throw DomainError(std::string("body specification: ") + e.what());
  }
}

ConvexBody ConvexBody::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open body file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

ConvexBody transform(const ConvexBody& body, const Matrix& rotation, const Vector& translation) {
  if (const Ball* b = body.ball()) return ConvexBody(Ball{rotation * b->center + translation, b->radius});
  if (const Ellipsoid* e = body.ellipsoid())
    return ConvexBody(Ellipsoid{rotation * e->center + translation, e->semiaxes, rotation * e->orientation});
  std::vector<Vector> verts;
  for (const auto& v : body.polytope()->vertices()) verts.push_back(rotation * v + translation);
  return ConvexBody(Polytope::from_vertices(verts));
}

Section section(const ConvexBody& body, const AffineFlat& flat) {
  if (flat.dim() != body.dim()) throw DomainError("section: dimension mismatch");
  if (flat.subdim() < 1) throw DomainError("section: flat must have dimension >= 1");
  if (const Polytope* p = body.polytope()) return detail::polytope_section(*p, flat);

  const Matrix& f = flat.base().frame();
  Section out;
  if (const Ball* b = body.ball()) {
    const Vector rel = b->center - flat.offset();
    const Vector u0 = f.transpose() * rel;
    const double dist = (rel - f * u0).norm();
    if (std::abs(dist - b->radius) < kTangentTol) {
      out.status = SectionStatus::tangential;
      return out;
    }
    if (dist > b->radius) return out;
    out.status = SectionStatus::ok;
    out.body = ConvexBody(Ball{u0, std::sqrt(b->radius * b->radius - dist * dist)});
    return out;
  }
  const Ellipsoid& e = *body.ellipsoid();
  const Matrix m = shape_matrix(e);
  const Vector rel = flat.offset() - e.center;
  const Matrix g = f.transpose() * m * f;
  const Vector h = f.transpose() * m * rel;
  const double c = rel.dot(m * rel);
  const Eigen::LLT<Matrix> llt(g);
  const Vector ginv_h = llt.solve(h);
  const double rho2 = 1.0 - c + h.dot(ginv_h);
  // Depth of the flat inside X is about rho2 * a_min / 2 near tangency.
  if (std::abs(rho2) * e.semiaxes.minCoeff() * 0.5 < kTangentTol) {
    out.status = SectionStatus::tangential;
    return out;
  }
  if (rho2 < 0.0) return out;
  out.status = SectionStatus::ok;
  out.body = quadric_body(-ginv_h, g / rho2);
  return out;
}

std::vector<SupportSample> boundary_cubature(const ConvexBody& body, int order) {
  if (!body.is_smooth()) throw UnsupportedError("boundary_cubature: body is a polytope");
  const int d = body.dim();
  const SphereRule& rule = sphere_rule(d, order);
  std::vector<SupportSample> out;
  out.reserve(rule.weights.size());
  if (const Ball* b = body.ball()) {
    const double area_scale = std::pow(b->radius, d - 1);
    for (std::size_t i = 0; i < rule.weights.size(); ++i) {
      const Vector u = rule.points.col(static_cast<Eigen::Index>(i));
      out.push_back({b->center + b->radius * u, u, Vector::Constant(d - 1, 1.0 / b->radius),
                     tangent_frame(u), rule.weights[i] * area_scale});
    }
    return out;
  }
  const Ellipsoid& e = *body.ellipsoid();
  const Matrix m = shape_matrix(e);
  const double det_a = e.semiaxes.prod();
  for (std::size_t i = 0; i < rule.weights.size(); ++i) {
    const Vector u = rule.points.col(static_cast<Eigen::Index>(i));
    const Vector local = e.semiaxes.cwiseProduct(u);
    const Vector x = e.center + e.orientation * local;
    const Vector grad_local = u.cwiseQuotient(e.semiaxes);  // A^{-T} u in axis coordinates
    const double grad_norm = grad_local.norm();
    const Vector n = e.orientation * (grad_local / grad_norm);
    const Matrix t = tangent_frame(n);
    SupportSample s;
    s.x = x;
    s.n = n;
    s.weight = rule.weights[i] * det_a * grad_norm;
    if (d == 1) {
      s.kappas = Vector(0);
      s.dirs = t;
    } else {
      const double mx = (m * (x - e.center)).norm();
      Eigen::SelfAdjointEigenSolver<Matrix> eig(t.transpose() * m * t / mx);
      s.kappas = eig.eigenvalues();
      s.dirs = t * eig.eigenvectors();
    }
    out.push_back(std::move(s));
  }
  return out;
}

EnclosingBall circumball(const ConvexBody& body) {
  if (const Ball* b = body.ball()) return {b->center, b->radius};
  if (const Ellipsoid* e = body.ellipsoid()) return {e->center, e->semiaxes.maxCoeff()};
  const auto& verts = body.polytope()->vertices();
  Vector lo = verts[0], hi = verts[0];
  for (const auto& v : verts) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  const Vector c = 0.5 * (lo + hi);
  double r = 0.0;
  for (const auto& v : verts) r = std::max(r, (v - c).norm());
  return {c, r};
}

double origin_boundary_distance(const ConvexBody& body) {
  const int d = body.dim();
  if (const Ball* b = body.ball()) return std::abs(b->center.norm() - b->radius);
  if (const Ellipsoid* e = body.ellipsoid()) {
    const Matrix m = shape_matrix(*e);
    const double lambda = std::sqrt(e->center.dot(m * e->center));
    return std::abs(lambda - 1.0) * e->semiaxes.minCoeff();
  }
  const Polytope& p = *body.polytope();
  double slack = std::numeric_limits<double>::infinity();
  for (const auto& h : p.halfspaces()) slack = std::min(slack, h.offset);
  if (slack >= 0.0) return slack;  // origin inside or on the boundary
  // Outside: exact distance to the nearest face.
  double best = std::numeric_limits<double>::infinity();
  const auto& verts = p.vertices();
  for (const auto& v : verts) best = std::min(best, v.norm());
  if (d >= 2) {
    for (const FaceData* f : p.faces_of_dim(1)) {
      const Vector& a = verts[f->vertices[0]];
      const Vector& b = verts[f->vertices[1]];
      const double t = std::clamp(-a.dot(b - a) / (b - a).squaredNorm(), 0.0, 1.0);
      best = std::min(best, (a + t * (b - a)).norm());
    }
  }
  for (const auto& h : p.halfspaces()) {
    const Vector proj = h.offset * h.normal;
    bool inside = true;
    for (const auto& g : p.halfspaces())
      if (g.normal.dot(proj) - g.offset > 1e-12) inside = false;
    if (inside) best = std::min(best, std::abs(h.offset));
  }
  return best;
}

double validate_rotational(const ConvexBody& body) {
  const double dist = origin_boundary_distance(body);
  if (!(dist > kTangentTol)) throw OriginOnBoundaryError(dist);
  return dist;
}

WeightedFlat sample_affine_hitting(const ConvexBody& body, int subdim, Rng& rng) {
  const EnclosingBall ball = circumball(body);
  return sample_affine_in_ball(body.dim(), subdim, ball.center, ball.radius, rng);
}

}  // namespace crofton
