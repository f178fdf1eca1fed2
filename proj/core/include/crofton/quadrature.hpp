#pragma once

#include "crofton/symtensor.hpp"

#include <vector>

namespace crofton {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1].
const QuadratureRule& gauss_legendre(int n);

/// n-point Gauss-Jacobi rule for the weight (1-x)^alpha (1+x)^beta on [-1, 1].
QuadratureRule gauss_jacobi(int n, double alpha, double beta);

/// Gauss-Legendre rule mapped to [a, b].
QuadratureRule gauss_legendre(int n, double a, double b);

/// Product rule on S^{dim-1} ⊂ R^dim; points are the columns of `points`.
///
/// dim = 1 is the counting measure on {-1, +1}; dim = 2 the periodic
/// trapezoid rule with `order` nodes; dim >= 3 recurses through the
/// decomposition u = t e_dim + sqrt(1-t^2) w with a Gauss-Jacobi rule in t.
struct SphereRule {
  Matrix points;
  std::vector<double> weights;
};
const SphereRule& sphere_rule(int dim, int order);

/// Collapsed (Duffy) tensor rule on the reference triangle
/// {u, v >= 0, u + v <= 1}; weights sum to 1/2.
struct TriangleRule {
  std::vector<double> u;
  std::vector<double> v;
  std::vector<double> weights;
};
const TriangleRule& triangle_rule(int n);

}  // namespace crofton
