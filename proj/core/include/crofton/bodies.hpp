#pragma once

#include "crofton/flats.hpp"
#include "crofton/symtensor.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace crofton {

struct Ball {
  Vector center;
  double radius = 1.0;
};

/// { center + R diag(semiaxes) u : |u| <= 1 }; the columns of `orientation`
/// are the axis directions.
struct Ellipsoid {
  Vector center;
  Vector semiaxes;
  Matrix orientation;
};

struct Halfspace {
  Vector normal;  // unit outer normal
  double offset;  // <normal, x> <= offset
};

/// A face of a polytope together with its normal cone.
///
/// `cone` holds the outer unit normals of the facets containing the face,
/// ordered cyclically for vertices of 3-polytopes; its positive hull
/// intersected with the sphere is N(F) ∩ S^{d-1}, of dimension d - 1 - k.
struct FaceData {
  int k = 0;
  /// Vertex indices; cyclically ordered for 2-faces.
  std::vector<int> vertices;
  /// Orthonormal frame of the direction space of the face (d x k).
  Matrix span;
  Matrix cone;
};

/// Full-dimensional convex polytope in R^d for d <= 3, holding both the
/// vertex and the facet description.
class Polytope {
 public:
  static Polytope from_vertices(const std::vector<Vector>& vertices);
  static Polytope from_halfspaces(const std::vector<Halfspace>& halfspaces);
  /// Axis-parallel box [lo, hi].
  static Polytope box(const Vector& lo, const Vector& hi);

  int dim() const { return dim_; }
  const std::vector<Vector>& vertices() const { return vertices_; }
  /// Facet halfspaces; facet i is faces_of_dim(d-1)[i].
  const std::vector<Halfspace>& halfspaces() const { return halfspaces_; }
  /// Complete face lattice below dimension d.
  const std::vector<FaceData>& faces() const { return faces_; }
  std::vector<const FaceData*> faces_of_dim(int k) const;

 private:
  Polytope(std::vector<Vector> vertices, std::vector<Halfspace> halfspaces);
  void build_faces();

  int dim_ = 0;
  std::vector<Vector> vertices_;
  std::vector<Halfspace> halfspaces_;
  std::vector<FaceData> faces_;
};

enum class BodyKind { ball, ellipsoid, polytope };

class ConvexBody {
 public:
  ConvexBody(Ball ball);
  ConvexBody(Ellipsoid ellipsoid);
  ConvexBody(Polytope polytope);

  int dim() const { return dim_; }
  BodyKind kind() const;
  bool is_smooth() const { return kind() != BodyKind::polytope; }
  std::string kind_name() const;

  const Ball* ball() const { return std::get_if<Ball>(&shape_); }
  const Ellipsoid* ellipsoid() const { return std::get_if<Ellipsoid>(&shape_); }
  const Polytope* polytope() const { return std::get_if<Polytope>(&shape_); }

  /// Ellipsoid view of a smooth body (a ball is an ellipsoid).
  Ellipsoid as_ellipsoid() const;

  /// Body specification: {"type": "ball"|"ellipsoid"|"polytope", ...}.
  std::string to_json() const;
  static ConvexBody from_json(std::string_view text);
  static ConvexBody load(const std::string& path);

 private:
  std::variant<Ball, Ellipsoid, Polytope> shape_;
  int dim_;
};

/// Rigid motion x -> rotation * x + translation applied to a body.
ConvexBody transform(const ConvexBody& body, const Matrix& rotation,
                     const Vector& translation);

/// Boundary node of a cubature rule on the boundary (or a facet).
struct SupportSample {
  Vector x;
  Vector n;
  Vector kappas;  // d - 1 principal curvatures
  Matrix dirs;    // principal directions as columns, orthonormal, ⟂ n
  double weight;  // boundary area element
};

enum class SectionStatus { ok, empty, tangential };

struct Section {
  SectionStatus status = SectionStatus::empty;
  /// The section in the flat's own orthonormal coordinates.
  std::optional<ConvexBody> body;
};

/// X ∩ E expressed in E-coordinates u, where x = E.offset + E.frame * u.
/// Intersections of dimension below dim E, or flats within 1e-9 of touching
/// the boundary only, are reported as tangential.
Section section(const ConvexBody& body, const AffineFlat& flat);

/// Cubature of the boundary of a smooth body: `order` nodes per angle on the
/// parameter sphere, with exact curvature data.
std::vector<SupportSample> boundary_cubature(const ConvexBody& body, int order);

/// Cubature of the facets of a polytope (or the boundary of a smooth body),
/// adequate for smooth integrands against the boundary measure. Facets are
/// triangulated and each triangle split 4^levels times.
std::vector<SupportSample> facet_cubature(const Polytope& polytope, int order,
                                          int levels);

/// Nodes and weights for integrals over a face and over its normal cone.
struct PointRule {
  std::vector<Vector> points;
  std::vector<double> weights;
};
PointRule face_rule(const Polytope& polytope, const FaceData& face, int order);
PointRule cone_rule(const FaceData& face, int order);

/// Enclosing ball used by affine sampling.
struct EnclosingBall {
  Vector center;
  double radius;
};
EnclosingBall circumball(const ConvexBody& body);

/// Distance from the origin to the boundary (a lower bound for ellipsoids).
double origin_boundary_distance(const ConvexBody& body);

/// Checks that the origin is not on the boundary; throws
/// OriginOnBoundaryError otherwise. Returns the distance estimate.
double validate_rotational(const ConvexBody& body);

/// Affine flat meeting the enclosing ball, with its importance weight.
WeightedFlat sample_affine_hitting(const ConvexBody& body, int subdim, Rng& rng);

}  // namespace crofton
