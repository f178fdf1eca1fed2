#pragma once

#include "crofton/rng.hpp"
#include "crofton/symtensor.hpp"

namespace crofton {

/// j-dimensional linear subspace of R^d, stored as a d x j orthonormal frame.
class LinearFlat {
 public:
  /// The zero subspace of R^d.
  explicit LinearFlat(int dim);
  /// Throws DomainError unless the columns are orthonormal within 1e-12.
  explicit LinearFlat(Matrix frame);

  /// Orthonormalizes arbitrary independent columns (modified Gram-Schmidt
  /// with one reorthogonalization pass).
  static LinearFlat from_spanning(const Matrix& columns);
  static LinearFlat full(int dim);

  int dim() const { return static_cast<int>(frame_.rows()); }
  int subdim() const { return static_cast<int>(frame_.cols()); }
  const Matrix& frame() const { return frame_; }

  /// Orthonormal frame of the orthogonal complement.
  Matrix complement() const;

 private:
  Matrix frame_;
};

/// E = L + offset with offset orthogonal to L.
class AffineFlat {
 public:
  AffineFlat(LinearFlat base, Vector offset);
  explicit AffineFlat(LinearFlat base);

  const LinearFlat& base() const { return base_; }
  const Vector& offset() const { return offset_; }
  int dim() const { return base_.dim(); }
  int subdim() const { return base_.subdim(); }

  /// Ambient point of flat coordinates u.
  Vector to_ambient(const Vector& u) const { return offset_ + base_.frame() * u; }

 private:
  LinearFlat base_;
  Vector offset_;
};

Vector project(const Vector& x, const LinearFlat& flat);
/// pi(x | F); throws DomainError when x is orthogonal to F.
Vector normalize_project(const Vector& x, const LinearFlat& flat);

/// L^x, the span of a flat and a vector outside it.
LinearFlat span_with(const LinearFlat& flat, const Vector& x);

/// Generalized sine of two subspaces: the volume of the parallelepiped
/// spanned by an orthonormal basis of A ∩ B extended to bases of A and B.
///
/// Computed from the principal angles: with e = max(0, dim A + dim B - d)
/// the generic intersection dimension, the e smallest angles are dropped and
/// the sines of the rest multiplied. This satisfies G(H, B) = |p(n | B)| for
/// a hyperplane H with unit normal n and is continuous in both arguments.
double generalized_sine(const LinearFlat& a, const LinearFlat& b);

/// Haar-uniform j-subspace of R^d.
LinearFlat sample_linear(int dim, int subdim, Rng& rng);
/// Haar-uniform j-subspace of `within`.
LinearFlat sample_linear_within(const LinearFlat& within, int subdim, Rng& rng);

/// Uniform point of the ball of the given radius and center inside the
/// subspace spanned by `frame`.
Vector sample_ball(const Matrix& frame, const Vector& center, double radius,
                   Rng& rng);

/// Affine flat L + y with L Haar-uniform and y uniform in the ball of radius
/// `radius` about p(center | L^⊥). The returned weight
/// c_{d,j} * kappa_{d-j} * radius^{d-j} turns sample means into integrals
/// with respect to the motion invariant measure restricted to flats meeting
/// the ball.
struct WeightedFlat {
  AffineFlat flat;
  double weight;
};
WeightedFlat sample_affine_in_ball(int dim, int subdim, const Vector& center,
                                   double radius, Rng& rng);

}  // namespace crofton
