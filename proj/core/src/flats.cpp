#include "crofton/flats.hpp"

#include "crofton/errors.hpp"
#include "crofton/specfun.hpp"

#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace crofton {
namespace {

constexpr double kOrthoTol = 1e-12;

Matrix gram_schmidt(const Matrix& columns) {
  Matrix q = columns;
  for (Eigen::Index c = 0; c < q.cols(); ++c) {
    const double original = q.col(c).norm();
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index p = 0; p < c; ++p) q.col(c) -= q.col(p).dot(q.col(c)) * q.col(p);
    }
    const double norm = q.col(c).norm();
    if (!(norm > 1e-12 * std::max(original, 1e-300)))
      throw DomainError("frame columns are linearly dependent");
    q.col(c) /= norm;
  }
  if (q.cols() > 0 && q.cols() == q.rows() && q.determinant() < 0.0)
    q.col(q.cols() - 1) *= -1.0;
  return q;
}

Matrix gaussian_matrix(int rows, int cols, Rng& rng) {
  Matrix g(rows, cols);
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r) g(r, c) = rng.normal();
  return g;
}

}  // namespace

LinearFlat::LinearFlat(int dim) : frame_(dim, 0) {
  if (dim < 1) throw DomainError("LinearFlat: ambient dimension must be >= 1");
}

LinearFlat::LinearFlat(Matrix frame) : frame_(std::move(frame)) {
  if (frame_.rows() < 1) throw DomainError("LinearFlat: ambient dimension must be >= 1");
  if (frame_.cols() > frame_.rows())
    throw DomainError("LinearFlat: more frame vectors than dimensions");
  if (frame_.cols() > 0) {
    const Matrix gram = frame_.transpose() * frame_;
    const double err =
        (gram - Matrix::Identity(frame_.cols(), frame_.cols())).cwiseAbs().maxCoeff();
    if (err > kOrthoTol) throw DomainError("LinearFlat: frame is not orthonormal");
  }
}

LinearFlat LinearFlat::from_spanning(const Matrix& columns) {
  return LinearFlat(gram_schmidt(columns));
}

LinearFlat LinearFlat::full(int dim) { return LinearFlat(Matrix::Identity(dim, dim)); }

Matrix LinearFlat::complement() const {
  const int d = dim();
  const int j = subdim();
  if (j == 0) return Matrix::Identity(d, d);
  Eigen::HouseholderQR<Matrix> qr(frame_);
  const Matrix q = qr.householderQ() * Matrix::Identity(d, d);
  return q.rightCols(d - j);
}

AffineFlat::AffineFlat(LinearFlat base, Vector offset)
    : base_(std::move(base)), offset_(std::move(offset)) {
  if (offset_.size() != base_.dim())
    throw DomainError("AffineFlat: offset dimension mismatch");
  if (base_.subdim() > 0) {
    const double leak = (base_.frame().transpose() * offset_).cwiseAbs().maxCoeff();
    if (leak > kOrthoTol * std::max(1.0, offset_.norm()))
      throw DomainError("AffineFlat: offset is not orthogonal to the flat");
  }
}

AffineFlat::AffineFlat(LinearFlat base)
    : AffineFlat(base, Vector::Zero(base.dim())) {}

Vector project(const Vector& x, const LinearFlat& flat) {
  if (x.size() != flat.dim()) throw DomainError("project: dimension mismatch");
  return flat.frame() * (flat.frame().transpose() * x);
}

Vector normalize_project(const Vector& x, const LinearFlat& flat) {
  Vector p = project(x, flat);
  const double norm = p.norm();
  if (!(norm > 1e-14 * std::max(1.0, x.norm())))
    throw DomainError("normalize_project: vector is orthogonal to the flat");
  return p / norm;
}

LinearFlat span_with(const LinearFlat& flat, const Vector& x) {
  if (x.size() != flat.dim()) throw DomainError("span_with: dimension mismatch");
  const Vector residual = x - project(x, flat);
  const double norm = residual.norm();
  if (!(norm > 1e-12 * std::max(1.0, x.norm())))
    throw DomainError("span_with: vector lies in the flat");
  Matrix frame(flat.dim(), flat.subdim() + 1);
  frame.leftCols(flat.subdim()) = flat.frame();
  frame.col(flat.subdim()) = residual / norm;
  return LinearFlat(std::move(frame));
}

double generalized_sine(const LinearFlat& a, const LinearFlat& b) {
  if (a.dim() != b.dim()) throw DomainError("generalized_sine: dimension mismatch");
  const int na = a.subdim();
  const int nb = b.subdim();
  if (na == 0 || nb == 0) return 1.0;
  const int excess = std::max(0, na + nb - a.dim());
  Eigen::JacobiSVD<Matrix> svd(a.frame().transpose() * b.frame());
  const Vector cosines = svd.singularValues();  // descending
  double volume = 1.0;
  for (Eigen::Index i = excess; i < cosines.size(); ++i) {
    const double c = std::min(1.0, cosines[i]);
    volume *= std::sqrt(std::max(0.0, 1.0 - c * c));
  }
  return volume;
}

LinearFlat sample_linear(int dim, int subdim, Rng& rng) {
  if (subdim < 0 || subdim > dim)
    throw DomainError("sample_linear: need 0 <= j <= d");
  if (subdim == 0) return LinearFlat(dim);
  if (subdim == dim) return LinearFlat::full(dim);
  return LinearFlat(gram_schmidt(gaussian_matrix(dim, subdim, rng)));
}

LinearFlat sample_linear_within(const LinearFlat& within, int subdim, Rng& rng) {
  if (subdim < 0 || subdim > within.subdim())
    throw DomainError("sample_linear_within: j exceeds the enclosing dimension");
  if (subdim == within.subdim()) return within;
  if (subdim == 0) return LinearFlat(within.dim());
  const Matrix coords = gram_schmidt(gaussian_matrix(within.subdim(), subdim, rng));
  return LinearFlat::from_spanning(within.frame() * coords);
}

Vector sample_ball(const Matrix& frame, const Vector& center, double radius,
                   Rng& rng) {
  const auto m = static_cast<int>(frame.cols());
  if (m == 0) return center;
  Vector g(m);
  for (int i = 0; i < m; ++i) g[i] = rng.normal();
  const double scale = radius * std::pow(rng.uniform(), 1.0 / m) / g.norm();
  return center + frame * (scale * g);
}

WeightedFlat sample_affine_in_ball(int dim, int subdim, const Vector& center,
                                   double radius, Rng& rng) {
  if (subdim <= 0 || subdim >= dim)
    throw DomainError("sample_affine: need 0 < j < d");
  if (!(radius > 0.0)) throw DomainError("sample_affine: radius must be positive");
  LinearFlat base = sample_linear(dim, subdim, rng);
  const Matrix perp = base.complement();
  const Vector c_perp = perp * (perp.transpose() * center);
  Vector y = sample_ball(perp, c_perp, radius, rng);
  y -= project(y, base);  // remove rounding leakage into L
  const double weight = grassmann_total(dim, subdim) * ball_volume(dim - subdim) *
                        std::pow(radius, dim - subdim);
  return {AffineFlat(std::move(base), std::move(y)), weight};
}

}  // namespace crofton
