#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace crofton {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr int kMaxRank = 8;
inline constexpr int kMaxDim = 16;

/// Storage layout of symmetric tensors of a fixed (dim, rank).
///
/// Multi-indices (m_1, ..., m_d) with sum m_i = rank are enumerated in
/// descending lexicographic order, so (2,0) < (1,1) < (0,2) in index order.
struct TensorLayout {
  int dim = 0;
  int rank = 0;
  std::size_t size = 0;
  /// size * dim exponents, row-major.
  std::vector<int> exponents;
  /// multinomial(rank; m) per entry.
  std::vector<double> multinomial;

  std::span<const int> multi_index(std::size_t i) const {
    return {exponents.data() + i * static_cast<std::size_t>(dim),
            static_cast<std::size_t>(dim)};
  }
  std::size_t index_of(std::span<const int> m) const;
};

const TensorLayout& tensor_layout(int dim, int rank);

/// Dense symmetric tensor of rank p over R^d.
///
/// Coefficient c_m is the value of the multilinear form on any argument
/// sequence of basis vectors whose multiset of indices is m. The associated
/// homogeneous polynomial is T(u, ..., u) = sum_m multinomial(p; m) c_m u^m.
class SymTensor {
 public:
  SymTensor() : SymTensor(1, 0) {}
  SymTensor(int dim, int rank);

  static SymTensor scalar(double value, int dim);
  static SymTensor from_vector(const Vector& v);

  int dim() const { return dim_; }
  int rank() const { return rank_; }
  std::size_t size() const { return coeffs_.size(); }
  const TensorLayout& layout() const { return tensor_layout(dim_, rank_); }

  std::span<const double> coeffs() const { return coeffs_; }
  std::span<double> coeffs() { return coeffs_; }
  double operator[](std::size_t i) const { return coeffs_[i]; }
  double& operator[](std::size_t i) { return coeffs_[i]; }

  double at(std::span<const int> multi_index) const;
  double& at(std::span<const int> multi_index);
  double at(std::initializer_list<int> multi_index) const {
    return at(std::span<const int>(multi_index.begin(), multi_index.size()));
  }

  /// Scalar value of a rank-0 tensor.
  double value() const;
  /// Vector of a rank-1 tensor.
  Vector to_vector() const;

  /// Multilinear form T(v_1, ..., v_p).
  double evaluate(std::span<const Vector> args) const;
  /// Polynomial T(u, ..., u).
  double evaluate_power(const Vector& u) const;

  double max_abs() const;

  SymTensor& operator+=(const SymTensor& other);
  SymTensor& operator-=(const SymTensor& other);
  SymTensor& operator*=(double factor);
  /// this += factor * other
  SymTensor& add_scaled(const SymTensor& other, double factor);

  std::string to_json() const;
  static SymTensor from_json(std::string_view text);

 private:
  void check_compatible(const SymTensor& other, const char* what) const;

  int dim_;
  int rank_;
  std::vector<double> coeffs_;
};

SymTensor operator+(SymTensor a, const SymTensor& b);
SymTensor operator-(SymTensor a, const SymTensor& b);
SymTensor operator*(double factor, SymTensor a);
SymTensor operator*(SymTensor a, double factor);

/// Symmetrized tensor product A ⊙ B.
SymTensor sym_product(const SymTensor& a, const SymTensor& b);

/// p-fold symmetric power of a vector; vector_power(v, 0) is the scalar 1.
SymTensor vector_power(const Vector& v, int p);

/// Metric tensor sum_i w_i^2 of an orthonormal frame (columns of `frame`).
SymTensor metric_tensor(const Matrix& frame);
/// Metric tensor Q of R^d.
SymTensor metric_tensor(int dim);
/// Q^p, with Q^0 the scalar 1.
SymTensor metric_power(int dim, int p);

/// Contr(T, S): contracts the rank of S into T, leaving rank T.rank - S.rank.
SymTensor contract(const SymTensor& t, const SymTensor& s);

/// Coefficientwise |a - b| <= atol + rtol * max|coeff|.
bool approx_equal(const SymTensor& a, const SymTensor& b, double atol = 1e-12,
                  double rtol = 1e-10);

/// Accumulates weight * x^r ⊙ n^s into `out` (rank r + s) without building
/// intermediate tensors. Used in the cubature inner loops.
void accumulate_power_product(SymTensor& out, const Vector& x, int r,
                              const Vector& n, int s, double weight);

/// Accumulates weight * x^r ⊙ g into `out`, where g has rank out.rank - r.
void accumulate_power_times(SymTensor& out, const Vector& x, int r,
                            const SymTensor& g, double weight);

}  // namespace crofton
