#include "crofton/bodies.hpp"
#include "crofton/errors.hpp"
#include "crofton/quadrature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace crofton {
namespace {

double scale_of(const std::vector<Vector>& points) {
  double s = 1.0;
  for (const auto& p : points) s = std::max(s, p.cwiseAbs().maxCoeff());
  return s;
}

int affine_rank(const std::vector<Vector>& points, double tol) {
  if (points.size() < 2) return points.empty() ? -1 : 0;
  Matrix diffs(points[0].size(), points.size() - 1);
  for (std::size_t i = 1; i < points.size(); ++i) diffs.col(i - 1) = points[i] - points[0];
  Eigen::JacobiSVD<Matrix> svd(diffs);
  int rank = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()[i] > tol) ++rank;
  return rank;
}

void push_unique(std::vector<Vector>& points, const Vector& p, double tol) {
  for (const auto& q : points)
    if ((q - p).cwiseAbs().maxCoeff() <= tol) return;
  points.push_back(p);
}

/// Orthonormal 2-frame of the plane orthogonal to a unit vector in R^3.
Matrix plane_frame(const Vector& n) {
  Vector helper = Vector::Zero(3);
  Eigen::Index axis;
  n.cwiseAbs().minCoeff(&axis);
  helper[axis] = 1.0;
  Matrix f(3, 2);
  f.col(0) = (helper - helper.dot(n) * n).normalized();
  f.col(1) = Eigen::Vector3d(n[0], n[1], n[2]).cross(Eigen::Vector3d(f(0, 0), f(1, 0), f(2, 0)));
  return f;
}

/// Sorts points of a planar convex polygon (embedded in R^3, plane normal n)
/// counterclockwise as seen from the side n points to.
template <typename Index>
void order_cyclic(std::vector<Index>& ids, const std::vector<Vector>& points,
                  const Vector& n) {
  Vector centroid = Vector::Zero(points[0].size());
  for (auto i : ids) centroid += points[i];
  centroid /= static_cast<double>(ids.size());
  const Matrix f = plane_frame(n);
  std::vector<std::pair<double, Index>> keyed;
  for (auto i : ids) {
    const Vector d = points[i] - centroid;
    keyed.emplace_back(std::atan2(f.col(1).dot(d), f.col(0).dot(d)), i);
  }
  std::sort(keyed.begin(), keyed.end());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = keyed[i].second;
}

Vector cross3(const Vector& a, const Vector& b) {
  Vector c(3);
  c << a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0];
  return c;
}

struct Enumerated {
  std::vector<Vector> vertices;
  bool feasible = false;
};

/// Vertices of {u : <a_i, u> <= b_i} in R^m, m <= 3, by solving every
/// m-subset of the constraints.
Enumerated enumerate_vertices(const std::vector<Halfspace>& hs, int m, double tol) {
  Enumerated out;
  const auto count = static_cast<int>(hs.size());
  auto feasible = [&](const Vector& u) {
    for (const auto& h : hs)
      if (h.normal.dot(u) - h.offset > tol) return false;
    return true;
  };
  std::vector<int> idx(m);
  std::function<void(int, int)> recurse = [&](int start, int depth) {
    if (depth == m) {
      Matrix a(m, m);
      Vector b(m);
      for (int r = 0; r < m; ++r) {
        a.row(r) = hs[idx[r]].normal.transpose();
        b[r] = hs[idx[r]].offset;
      }
      Eigen::FullPivLU<Matrix> lu(a);
      if (lu.rank() < m) return;
      if (std::abs(a.determinant()) < 1e-12) return;
      const Vector u = lu.solve(b);
      if (feasible(u)) push_unique(out.vertices, u, tol);
      return;
    }
    for (int i = start; i < count; ++i) {
      idx[depth] = i;
      recurse(i + 1, depth + 1);
    }
  };
  recurse(0, 0);
  out.feasible = !out.vertices.empty();
  return out;
}

std::vector<Halfspace> normalized(const std::vector<Halfspace>& hs, int dim,
                                  bool& infeasible) {
  std::vector<Halfspace> out;
  infeasible = false;
  for (const auto& h : hs) {
    if (h.normal.size() != dim) throw DomainError("halfspace dimension mismatch");
    const double norm = h.normal.norm();
    if (norm < 1e-12) {
      if (h.offset < -1e-12) infeasible = true;
      continue;
    }
    out.push_back({h.normal / norm, h.offset / norm});
  }
  return out;
}

/// Facets of the hull of points that are known to be in convex position
/// candidates (d <= 3), as halfspaces.
std::vector<Halfspace> hull_facets(const std::vector<Vector>& pts, int d, double tol) {
  std::vector<Halfspace> facets;
  const auto n = static_cast<int>(pts.size());
  auto add = [&](Vector normal, double offset) {
    normal.normalize();
    offset = normal.dot(pts[0]) + (offset - normal.dot(pts[0]));
    for (const auto& f : facets)
      if ((f.normal - normal).norm() < 1e-9 && std::abs(f.offset - offset) < tol) return;
    facets.push_back({normal, offset});
  };
  auto supporting = [&](const Vector& normal, double offset) {
    for (const auto& p : pts)
      if (normal.dot(p) - offset > tol) return false;
    return true;
  };
  if (d == 1) {
    double lo = pts[0][0], hi = pts[0][0];
    for (const auto& p : pts) {
      lo = std::min(lo, p[0]);
      hi = std::max(hi, p[0]);
    }
    Vector m(1), pl(1);
    m << -1.0;
    pl << 1.0;
    facets.push_back({m, -lo});
    facets.push_back({pl, hi});
    return facets;
  }
  if (d == 2) {
    for (int a = 0; a < n; ++a) {
      for (int b = a + 1; b < n; ++b) {
        const Vector e = pts[b] - pts[a];
        if (e.norm() <= tol) continue;
        Vector normal(2);
        normal << e[1], -e[0];
        normal.normalize();
        for (double sign : {1.0, -1.0}) {
          const Vector nn = sign * normal;
          const double off = nn.dot(pts[a]);
          if (supporting(nn, off)) add(nn, off);
        }
      }
    }
    return facets;
  }
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      for (int c = b + 1; c < n; ++c) {
        Vector normal = cross3(pts[b] - pts[a], pts[c] - pts[a]);
        if (normal.norm() <= tol * tol) continue;
        normal.normalize();
        for (double sign : {1.0, -1.0}) {
          const Vector nn = sign * normal;
          const double off = nn.dot(pts[a]);
          if (supporting(nn, off)) add(nn, off);
        }
      }
    }
  }
  return facets;
}

std::vector<int> active_set(const std::vector<Halfspace>& hs, const Vector& v, double tol) {
  std::vector<int> act;
  for (std::size_t i = 0; i < hs.size(); ++i)
    if (std::abs(hs[i].normal.dot(v) - hs[i].offset) <= tol) act.push_back(static_cast<int>(i));
  return act;
}

/// Keeps halfspaces that support a facet: at least d affinely independent
/// vertices on the boundary hyperplane. Duplicates are merged.
std::vector<Halfspace> facet_halfspaces(const std::vector<Halfspace>& hs,
                                        const std::vector<Vector>& verts, int d,
                                        double tol) {
  std::vector<Halfspace> out;
  for (const auto& h : hs) {
    std::vector<Vector> on;
    for (const auto& v : verts)
      if (std::abs(h.normal.dot(v) - h.offset) <= tol) on.push_back(v);
    if (static_cast<int>(on.size()) < d || affine_rank(on, tol) < d - 1) continue;
    bool dup = false;
    for (const auto& f : out)
      if ((f.normal - h.normal).norm() < 1e-9) dup = true;
    if (!dup) out.push_back(h);
  }
  return out;
}

}  // namespace

Polytope::Polytope(std::vector<Vector> vertices, std::vector<Halfspace> halfspaces)
    : dim_(static_cast<int>(vertices.at(0).size())),
      vertices_(std::move(vertices)),
      halfspaces_(std::move(halfspaces)) {
  if (dim_ < 1 || dim_ > 3)
    throw UnsupportedError("polytopes are supported in dimensions 1 to 3 only");
  build_faces();
}

Polytope Polytope::from_vertices(const std::vector<Vector>& input) {
  if (input.empty()) throw DomainError("polytope: no vertices");
  const int d = static_cast<int>(input[0].size());
  if (d < 1 || d > 3) throw UnsupportedError("polytopes are supported in dimensions 1 to 3 only");
  const double tol = 1e-9 * scale_of(input);
  std::vector<Vector> pts;
  for (const auto& p : input) {
    if (p.size() != d) throw DomainError("polytope: vertex dimension mismatch");
    push_unique(pts, p, tol);
  }
  if (affine_rank(pts, tol) < d) throw DomainError("polytope: vertices are not full-dimensional");
  auto facets = hull_facets(pts, d, tol);
  std::vector<Vector> extreme;
  for (const auto& p : pts) {
    const auto act = active_set(facets, p, tol);
    if (static_cast<int>(act.size()) < d) continue;
    Matrix normals(d, act.size());
    for (std::size_t i = 0; i < act.size(); ++i) normals.col(i) = facets[act[i]].normal;
    if (Eigen::FullPivLU<Matrix>(normals).rank() == d) extreme.push_back(p);
  }
  facets = facet_halfspaces(facets, extreme, d, tol);
  return Polytope(std::move(extreme), std::move(facets));
}

Polytope Polytope::from_halfspaces(const std::vector<Halfspace>& input) {
  if (input.empty()) throw DomainError("polytope: no halfspaces");
  const int d = static_cast<int>(input[0].normal.size());
  if (d < 1 || d > 3) throw UnsupportedError("polytopes are supported in dimensions 1 to 3 only");
  bool infeasible = false;
  auto hs = normalized(input, d, infeasible);
  if (infeasible) throw DomainError("polytope: halfspaces have empty intersection");
  double scale = 1.0;
  for (const auto& h : hs) scale = std::max(scale, std::abs(h.offset));
  const double tol = 1e-9 * scale;
  const auto en = enumerate_vertices(hs, d, tol);
  if (!en.feasible) throw DomainError("polytope: halfspaces have empty or unbounded intersection");
  if (affine_rank(en.vertices, tol) < d) throw DomainError("polytope: intersection is not full-dimensional");
  Polytope p = from_vertices(en.vertices);
  // A bounded intersection has every hull facet among the input halfspaces.
  for (const auto& f : p.halfspaces()) {
    bool found = false;
    for (const auto& h : hs)
      if ((h.normal - f.normal).norm() < 1e-7 && std::abs(h.offset - f.offset) < 1e-7 * scale)
        found = true;
    if (!found) throw DomainError("polytope: halfspace intersection is unbounded");
  }
  return p;
}

Polytope Polytope::box(const Vector& lo, const Vector& hi) {
  const auto d = static_cast<int>(lo.size());
  if (hi.size() != d) throw DomainError("box: dimension mismatch");
  std::vector<Vector> verts;
  for (int mask = 0; mask < (1 << d); ++mask) {
    Vector v(d);
    for (int i = 0; i < d; ++i) v[i] = (mask >> i & 1) ? hi[i] : lo[i];
    verts.push_back(v);
  }
  return from_vertices(verts);
}

std::vector<const FaceData*> Polytope::faces_of_dim(int k) const {
  std::vector<const FaceData*> out;
  for (const auto& f : faces_)
    if (f.k == k) out.push_back(&f);
  return out;
}

void Polytope::build_faces() {
  const int d = dim_;
  const double tol = 1e-9 * scale_of(vertices_);
  faces_.clear();
  for (const auto& v : vertices_) {
    for (const auto& h : halfspaces_)
      if (h.normal.dot(v) - h.offset > tol)
        throw DomainError("polytope: vertex violates a facet halfspace");
  }

  if (d == 1) {
    std::sort(vertices_.begin(), vertices_.end(),
              [](const Vector& a, const Vector& b) { return a[0] < b[0]; });
    if (vertices_.size() != 2) throw DomainError("polytope: a segment needs two vertices");
    halfspaces_.clear();
    Vector m(1), p(1);
    m << -1.0;
    p << 1.0;
    halfspaces_.push_back({m, -vertices_[0][0]});
    halfspaces_.push_back({p, vertices_[1][0]});
    for (int i = 0; i < 2; ++i) {
      FaceData f;
      f.k = 0;
      f.vertices = {i};
      f.span = Matrix(1, 0);
      f.cone = Matrix(1, 1);
      f.cone(0, 0) = i == 0 ? -1.0 : 1.0;
      faces_.push_back(std::move(f));
    }
    return;
  }

  if (d == 2) {
    std::vector<int> order(vertices_.size());
    std::iota(order.begin(), order.end(), 0);
    Vector centroid = Vector::Zero(2);
    for (const auto& v : vertices_) centroid += v;
    centroid /= static_cast<double>(vertices_.size());
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return std::atan2(vertices_[a][1] - centroid[1], vertices_[a][0] - centroid[0]) <
             std::atan2(vertices_[b][1] - centroid[1], vertices_[b][0] - centroid[0]);
    });
    std::vector<Vector> sorted;
    for (int i : order) sorted.push_back(vertices_[i]);
    vertices_ = std::move(sorted);
    const auto nv = static_cast<int>(vertices_.size());
    std::vector<Halfspace> edges;
    for (int i = 0; i < nv; ++i) {
      const Vector& a = vertices_[i];
      const Vector& b = vertices_[(i + 1) % nv];
      Vector normal(2);
      normal << b[1] - a[1], a[0] - b[0];
      normal.normalize();
      edges.push_back({normal, normal.dot(a)});
    }
    halfspaces_ = edges;
    for (int i = 0; i < nv; ++i) {
      FaceData f;
      f.k = 0;
      f.vertices = {i};
      f.span = Matrix(2, 0);
      f.cone = Matrix(2, 2);
      f.cone.col(0) = edges[(i + nv - 1) % nv].normal;
      f.cone.col(1) = edges[i].normal;
      faces_.push_back(std::move(f));
    }
    for (int i = 0; i < nv; ++i) {
      FaceData f;
      f.k = 1;
      f.vertices = {i, (i + 1) % nv};
      f.span = (vertices_[(i + 1) % nv] - vertices_[i]).normalized();
      f.cone = edges[i].normal;
      faces_.push_back(std::move(f));
    }
    return;
  }

  // d == 3
  const auto nf = static_cast<int>(halfspaces_.size());
  std::vector<std::vector<int>> on_facet(nf);
  for (int fi = 0; fi < nf; ++fi) {
    for (int v = 0; v < static_cast<int>(vertices_.size()); ++v)
      if (std::abs(halfspaces_[fi].normal.dot(vertices_[v]) - halfspaces_[fi].offset) <= tol)
        on_facet[fi].push_back(v);
    order_cyclic(on_facet[fi], vertices_, halfspaces_[fi].normal);
  }
  for (int v = 0; v < static_cast<int>(vertices_.size()); ++v) {
    std::vector<int> act;
    for (int fi = 0; fi < nf; ++fi)
      if (std::find(on_facet[fi].begin(), on_facet[fi].end(), v) != on_facet[fi].end())
        act.push_back(fi);
    std::vector<Vector> normals;
    for (int fi : act) normals.push_back(halfspaces_[fi].normal);
    Vector mean = Vector::Zero(3);
    for (const auto& n : normals) mean += n;
    std::vector<int> ids(act.size());
    std::iota(ids.begin(), ids.end(), 0);
    order_cyclic(ids, normals, mean.normalized());
    FaceData f;
    f.k = 0;
    f.vertices = {v};
    f.span = Matrix(3, 0);
    f.cone = Matrix(3, act.size());
    for (std::size_t i = 0; i < ids.size(); ++i) f.cone.col(i) = normals[ids[i]];
    faces_.push_back(std::move(f));
  }
  for (int a = 0; a < nf; ++a) {
    for (int b = a + 1; b < nf; ++b) {
      std::vector<int> shared;
      for (int v : on_facet[a])
        if (std::find(on_facet[b].begin(), on_facet[b].end(), v) != on_facet[b].end())
          shared.push_back(v);
      if (shared.size() < 2) continue;
      if (shared.size() > 2) throw DomainError("polytope: degenerate edge");
      FaceData f;
      f.k = 1;
      f.vertices = shared;
      f.span = (vertices_[shared[1]] - vertices_[shared[0]]).normalized();
      f.cone = Matrix(3, 2);
      f.cone.col(0) = halfspaces_[a].normal;
      f.cone.col(1) = halfspaces_[b].normal;
      faces_.push_back(std::move(f));
    }
  }
  for (int fi = 0; fi < nf; ++fi) {
    FaceData f;
    f.k = 2;
    f.vertices = on_facet[fi];
    f.span = plane_frame(halfspaces_[fi].normal);
    f.cone = halfspaces_[fi].normal;
    faces_.push_back(std::move(f));
  }
}

PointRule face_rule(const Polytope& polytope, const FaceData& face, int order) {
  const auto& verts = polytope.vertices();
  PointRule rule;
  if (face.k == 0) {
    rule.points.push_back(verts[face.vertices[0]]);
    rule.weights.push_back(1.0);
    return rule;
  }
  if (face.k == 1) {
    const Vector& a = verts[face.vertices[0]];
    const Vector& b = verts[face.vertices[1]];
    const double len = (b - a).norm();
    const QuadratureRule g = gauss_legendre(order, 0.0, 1.0);
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      rule.points.push_back(a + g.nodes[i] * (b - a));
      rule.weights.push_back(g.weights[i] * len);
    }
    return rule;
  }
  if (face.k == 2) {
    const TriangleRule& t = triangle_rule(order);
    const Vector& p0 = verts[face.vertices[0]];
    for (std::size_t i = 1; i + 1 < face.vertices.size(); ++i) {
      const Vector e1 = verts[face.vertices[i]] - p0;
      const Vector e2 = verts[face.vertices[i + 1]] - p0;
      const double jac = cross3(e1, e2).norm();
      for (std::size_t q = 0; q < t.weights.size(); ++q) {
        rule.points.push_back(p0 + t.u[q] * e1 + t.v[q] * e2);
        rule.weights.push_back(t.weights[q] * jac);
      }
    }
    return rule;
  }
  throw UnsupportedError("face_rule: face dimension above 2");
}

PointRule cone_rule(const FaceData& face, int order) {
  PointRule rule;
  const auto m = face.cone.cols();
  if (m == 1) {
    rule.points.push_back(face.cone.col(0));
    rule.weights.push_back(1.0);
    return rule;
  }
  if (m == 2) {
    const Vector e = face.cone.col(0);
    const Vector g = face.cone.col(1);
    const double c = std::clamp(e.dot(g), -1.0, 1.0);
    const double phi = std::acos(c);
    const Vector f = (g - c * e).normalized();
    const QuadratureRule q = gauss_legendre(order, 0.0, phi);
    for (std::size_t i = 0; i < q.nodes.size(); ++i) {
      rule.points.push_back(std::cos(q.nodes[i]) * e + std::sin(q.nodes[i]) * f);
      rule.weights.push_back(q.weights[i]);
    }
    return rule;
  }
  // Spherical polygon: fan of spherical triangles, each the radial
  // projection of a planar triangle.
  const TriangleRule& t = triangle_rule(order);
  const Vector n0 = face.cone.col(0);
  for (Eigen::Index i = 1; i + 1 < m; ++i) {
    const Vector e1 = face.cone.col(i) - n0;
    const Vector e2 = face.cone.col(i + 1) - n0;
    const double det = std::abs(n0.dot(cross3(e1, e2)));
    for (std::size_t q = 0; q < t.weights.size(); ++q) {
      const Vector p = n0 + t.u[q] * e1 + t.v[q] * e2;
      const double r = p.norm();
      rule.points.push_back(p / r);
      rule.weights.push_back(t.weights[q] * det / (r * r * r));
    }
  }
  return rule;
}

std::vector<SupportSample> facet_cubature(const Polytope& polytope, int order,
                                          int levels) {
  const int d = polytope.dim();
  std::vector<SupportSample> out;
  const auto facets = polytope.faces_of_dim(d - 1);
  const auto& verts = polytope.vertices();
  for (std::size_t fi = 0; fi < facets.size(); ++fi) {
    const FaceData& face = *facets[fi];
    const Vector n = face.cone.col(0);
    auto emit = [&](const Vector& x, double w) {
      out.push_back({x, n, Vector::Zero(d - 1), face.span, w});
    };
    if (d == 1) {
      emit(verts[face.vertices[0]], 1.0);
    } else if (d == 2) {
      const Vector& a = verts[face.vertices[0]];
      const Vector& b = verts[face.vertices[1]];
      const int pieces = 1 << levels;
      for (int p = 0; p < pieces; ++p) {
        const QuadratureRule g =
            gauss_legendre(order, double(p) / pieces, double(p + 1) / pieces);
        for (std::size_t i = 0; i < g.nodes.size(); ++i)
          emit(a + g.nodes[i] * (b - a), g.weights[i] * (b - a).norm());
      }
    } else {
      const TriangleRule& t = triangle_rule(order);
      struct Tri {
        Vector a, b, c;
      };
      std::vector<Tri> tris;
      const Vector& p0 = verts[face.vertices[0]];
      for (std::size_t i = 1; i + 1 < face.vertices.size(); ++i)
        tris.push_back({p0, verts[face.vertices[i]], verts[face.vertices[i + 1]]});
      for (int l = 0; l < levels; ++l) {
        std::vector<Tri> finer;
        for (const auto& tr : tris) {
          const Vector ab = 0.5 * (tr.a + tr.b);
          const Vector bc = 0.5 * (tr.b + tr.c);
          const Vector ca = 0.5 * (tr.c + tr.a);
          finer.push_back({tr.a, ab, ca});
          finer.push_back({ab, tr.b, bc});
          finer.push_back({ca, bc, tr.c});
          finer.push_back({ab, bc, ca});
        }
        tris = std::move(finer);
      }
      for (const auto& tr : tris) {
        const Vector e1 = tr.b - tr.a;
        const Vector e2 = tr.c - tr.a;
        const double jac = cross3(e1, e2).norm();
        for (std::size_t q = 0; q < t.weights.size(); ++q)
          emit(tr.a + t.u[q] * e1 + t.v[q] * e2, t.weights[q] * jac);
      }
    }
  }
  return out;
}

namespace detail {

/// Section of a polytope {<a_i, x> <= b_i} by a flat, in flat coordinates.
Section polytope_section(const Polytope& polytope, const AffineFlat& flat) {
  const int m = flat.subdim();
  const Matrix& frame = flat.base().frame();
  std::vector<Halfspace> local;
  for (const auto& h : polytope.halfspaces())
    local.push_back({frame.transpose() * h.normal, h.offset - h.normal.dot(flat.offset())});
  bool infeasible = false;
  auto hs = normalized(local, m, infeasible);
  Section out;
  if (infeasible) return out;
  double scale = 1.0;
  for (const auto& v : polytope.vertices()) scale = std::max(scale, v.cwiseAbs().maxCoeff());
  const double tol = 1e-9 * scale;
  const auto en = enumerate_vertices(hs, m, tol);
  if (!en.feasible) return out;
  if (affine_rank(en.vertices, tol) < m) {
    out.status = SectionStatus::tangential;
    return out;
  }
  auto facets = facet_halfspaces(hs, en.vertices, m, tol);
  std::vector<Vector> verts;
  for (const auto& v : en.vertices) {
    const auto act = active_set(facets, v, tol);
    if (static_cast<int>(act.size()) < m) continue;
    Matrix normals(m, act.size());
    for (std::size_t i = 0; i < act.size(); ++i) normals.col(i) = facets[act[i]].normal;
    if (Eigen::FullPivLU<Matrix>(normals).rank() == m) verts.push_back(v);
  }
  try {
    out.body = ConvexBody(Polytope::from_vertices(verts));
    out.status = SectionStatus::ok;
  } catch (const DomainError&) {
    out.status = SectionStatus::tangential;
  }
  return out;
}

}  // namespace detail
}  // namespace crofton
