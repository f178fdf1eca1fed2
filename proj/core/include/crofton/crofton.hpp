#pragma once

#include "crofton/bodies.hpp"
#include "crofton/minkowski.hpp"
#include "crofton/symtensor.hpp"

#include <cstdint>
#include <functional>
#include <string>

namespace crofton {

/// Tensor-valued integrand psi(E, x, n) on support elements of sections.
/// `direction` is the linear part of the flat E (E = direction + x).
struct PsiFunction {
  using Fn = std::function<SymTensor(const LinearFlat& direction, const Vector& x,
                                     const Vector& n)>;
  Fn fn;
  int dim = 0;
  int rank = 0;
  bool uses_flat = false;
  bool uses_n = true;

  SymTensor operator()(const LinearFlat& direction, const Vector& x, const Vector& n) const {
    return fn(direction, x, n);
  }

  static PsiFunction constant(int dim, double value);
  /// sigma_{j-k} / (r! s! sigma_{j-k+s}) x^r n^s, which turns Psi_{k,E} into
  /// Phi_{k,E}^{r,s}.
  static PsiFunction minkowski(int dim, int j, int k, int r, int s);
  /// x -> |x|^p (a scalar that ignores the flat and the normal).
  static PsiFunction norm_power(int dim, double p);
};

/// Deterministic right-hand sides carry zero standard errors.
struct RhsValue {
  SymTensor value;
  SymTensor se;
};

struct RhsConfig {
  /// Boundary cubature points per angle (smooth bodies).
  int order = kDefaultOrder;
  /// Facet rule order and subdivision levels (polytopes).
  int facet_order = 8;
  int facet_levels = 2;
  /// Inner Grassmannian Monte Carlo samples per boundary node.
  int inner_samples = 64;
  std::uint64_t seed = 0;
};

/// Boundary nodes used by the boundary-integral evaluators: exact curvature
/// data for smooth bodies, facet nodes (zero curvature) for polytopes.
std::vector<SupportSample> boundary_nodes(const ConvexBody& body, const RhsConfig& cfg);

// Rotational formulae (integrals over linear j-subspaces).

/// General rotational formula with an inner Monte Carlo over (j-1)-subspaces
/// of x^⊥; smooth bodies.
RhsValue rot_rhs_general(const ConvexBody& body, const PsiFunction& psi, int j, int k,
                         const RhsConfig& cfg = {});

/// Rotational integral of Phi_{j-1,L}^{r,s} for 1 < j < d as a single
/// boundary integral with hypergeometric weights.
RhsValue rot_rhs_surface(const ConvexBody& body, int j, int r, int s, const RhsConfig& cfg = {});

/// Rotational integral of Phi_{0,L}^{r,s} over lines (j = 1).
RhsValue rot_rhs_lines(const ConvexBody& body, int r, int s, const RhsConfig& cfg = {});

/// Rotational integral of Phi_{k,L}^{r,s} over hyperplanes (j = d-1) for
/// k < d-2; smooth bodies.
RhsValue rot_rhs_hyperplanes(const ConvexBody& body, int k, int r, int s,
                             const RhsConfig& cfg = {});

// Affine formulae (integrals over affine j-flats).

/// General affine formula with an inner Monte Carlo over linear j-subspaces;
/// smooth bodies.
RhsValue aff_rhs_general(const ConvexBody& body, const PsiFunction& psi, int j, int k,
                         const RhsConfig& cfg = {});

/// Affine formula for psi(x, n) independent of the flat, with the inner
/// half-sphere integral by product quadrature; smooth bodies.
RhsValue aff_rhs_psi_xn(const ConvexBody& body, const PsiFunction& psi, int j, int k,
                        const RhsConfig& cfg = {});

/// Affine formula for psi(x) depending on the position only:
/// constant * ∫ psi dLambda_{d-j+k}. With psi = 1 this is the classical
/// Crofton formula.
RhsValue aff_rhs_psi_x(const ConvexBody& body, const PsiFunction& psi, int j, int k,
                       const RhsConfig& cfg = {});

/// Constant of the position-only affine formula.
double classical_crofton_constant(int d, int j, int k);

enum class MinkowskiRoute { automatic, general, r0, kj1 };
MinkowskiRoute parse_minkowski_route(const std::string& name);

/// Affine integral of Phi_{k,E}^{r,s} as a combination of Minkowski tensors.
/// `general` needs generalized tensors (smooth bodies, or s < 2); `r0` needs
/// r = 0; `kj1` needs k = j-1. `automatic` picks the first applicable of
/// general (smooth), kj1, r0, general (s < 2); polytopes otherwise raise
/// UnsupportedError.
RhsValue aff_rhs_minkowski(const ConvexBody& body, int j, int k, int r, int s,
                           MinkowskiRoute route = MinkowskiRoute::automatic,
                           const RhsConfig& cfg = {});

/// Affine integral of the harmonic section tensors Xi~_{j-1,E}^{r,s}.
RhsValue aff_rhs_harmonic(const ConvexBody& body, int j, int r, int s, const RhsConfig& cfg = {});

}  // namespace crofton
