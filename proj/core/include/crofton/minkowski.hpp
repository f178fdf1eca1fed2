#pragma once

#include "crofton/bodies.hpp"
#include "crofton/symtensor.hpp"

#include <string>
#include <vector>

namespace crofton {

/// Points per angle for boundary cubature of smooth bodies.
inline constexpr int kDefaultOrder = 64;

/// Elementary symmetric polynomial e_m of the entries of v (e_0 = 1).
double elementary_symmetric(const Vector& v, int m);

/// Raw moment ∫ x^r n^s dmu_k of the k-th curvature measure
/// mu_k = sigma_{m-k} Lambda_k, where m is the dimension of the body.
/// With an embedding the body lives in flat coordinates and x, n are pushed
/// forward to the ambient space (x -> offset + F x, n -> F n).
/// k = m gives the volume moment ∫_X x^r dx (s must be 0).
SymTensor curvature_moment(const ConvexBody& body, int k, int r, int s,
                           const AffineFlat* embedding = nullptr,
                           int order = kDefaultOrder);

/// Node of a cubature for the curvature measure Lambda_k: ∫ f dLambda_k is
/// approximated by ∑ weight * f(x, n).
struct CurvatureNode {
  Vector x;
  Vector n;
  double weight;
};

/// Nodes for Lambda_k (0 <= k < dim) of a body, optionally pushed forward
/// from flat coordinates to the ambient space.
std::vector<CurvatureNode> curvature_nodes(const ConvexBody& body, int k,
                                           const AffineFlat* embedding = nullptr,
                                           int order = kDefaultOrder);

/// Minkowski tensor Phi_k^{r,s}; k = d with s = 0 is the volume tensor.
SymTensor phi(const ConvexBody& body, int k, int r, int s, int order = kDefaultOrder);

/// Intrinsic tensor Phi_{k,E}^{r,s} of a body given in the coordinates of
/// the flat E, returned in ambient coordinates.
SymTensor phi_relative(const ConvexBody& section, int k, int r, int s,
                       const AffineFlat& flat, int order = kDefaultOrder);

/// Tensor with a cubature error estimate from halving the order.
struct TensorEstimate {
  SymTensor value;
  double error = 0.0;
};
TensorEstimate phi_with_error(const ConvexBody& body, int k, int r, int s,
                              int order = kDefaultOrder);

/// Generalized tensor Phi_k^{r,s,1} of a smooth body, 1 <= k <= d-1.
SymTensor phi_generalized(const ConvexBody& body, int k, int r, int s,
                          int order = kDefaultOrder);

/// H^s_d(u) = sum_i (-1)^i Gamma(d/2+s-1-i) / (4^i i! (s-2i)!) |u|^{2i} Q^i u^{s-2i}.
SymTensor harmonic_basis(int d, int s, const Vector& u);

/// Coefficients of H^s_d: H^s_d(u) = sum_i coef[i] |u|^{2i} Q^i u^{s-2i}.
std::vector<double> harmonic_coefficients(int d, int s);

/// Harmonic Minkowski tensor Xi_k^{r,s}.
SymTensor xi(const ConvexBody& body, int k, int r, int s, int order = kDefaultOrder);

/// Xi~_{j-1,E}^{r,s} of a body in the coordinates of E, using the ambient
/// H^s_d on the section normals.
SymTensor xi_tilde_relative(const ConvexBody& section, int r, int s, const AffineFlat& flat,
                            int order = kDefaultOrder);

/// Residual LHS - RHS of one of the linear relations between generalized and
/// ordinary tensors.
struct IdentityResidual {
  std::string identity;  // "trivial", "linkomb", "linkomb2", "r0"
  SymTensor lhs;
  SymTensor residual;
};

/// All relations applicable to (k, r, s): "trivial" for k = d-1; "linkomb",
/// "linkomb2" and, when r = 0, "r0" for 1 <= k <= d-2. Tensors Phi_i with
/// i outside [0, d-1] vanish. Requires s >= 2 and a smooth body.
std::vector<IdentityResidual> check_prop21(const ConvexBody& body, int k, int r, int s,
                                           int order = kDefaultOrder);

}  // namespace crofton
