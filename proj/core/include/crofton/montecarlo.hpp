#pragma once

#include "crofton/bodies.hpp"
#include "crofton/crofton.hpp"
#include "crofton/symtensor.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace crofton {

/// Sectional functional evaluated intrinsically on X ∩ E and returned in
/// ambient coordinates.
struct Functional {
  enum class Kind {
    phi,  // Phi_{k,E}^{r,s}
    xi,   // Xi~_{j-1,E}^{r,s}
    psi,  // Psi_{k,E} = ∫ psi(E, x, n) dLambda_k
  };
  Kind kind = Kind::phi;
  int k = 0;
  int r = 0;
  int s = 0;
  std::optional<PsiFunction> psi;
  /// Cubature order on the section.
  int order = 32;

  static Functional phi(int k, int r, int s, int order = 32);
  static Functional xi(int r, int s, int order = 32);
  static Functional of_psi(PsiFunction psi, int k, int order = 32);

  int rank() const;
  /// Value on a section given in flat coordinates (an empty section is 0).
  SymTensor evaluate(const Section& sec, const AffineFlat& flat, int dim) const;
};

struct EstimatorConfig {
  long samples = 20000;
  std::uint64_t seed = 0;
  /// Worker threads; 0 means default_workers().
  int workers = 0;
  /// Keep per-sample values (for CSV export).
  bool keep_samples = false;
};

/// CROFTON_WORKERS if set, otherwise the hardware concurrency.
int default_workers();

struct Estimate {
  SymTensor mean;
  SymTensor se;
  long samples = 0;
  long empty = 0;
  long tangential = 0;
  /// Row-major samples x coefficients when requested.
  std::vector<double> values;
};

/// Rotational section average ∫ F(X ∩ L) nu_j(dL) over linear j-subspaces,
/// with Haar-distributed L and total mass c_{d,j}.
Estimate estimate_rot_lhs(const ConvexBody& body, int j, const Functional& f,
                          const EstimatorConfig& cfg);

/// Affine section integral ∫ F(X ∩ E) mu_j(dE) by sampling flats that meet
/// an enclosing ball.
Estimate estimate_aff_lhs(const ConvexBody& body, int j, const Functional& f,
                          const EstimatorConfig& cfg);

/// One verification experiment: a theorem route, its parameters and the
/// pass policy.
struct ExperimentSpec {
  std::string name;
  std::string route;  // rot-surface|rot-lines|rot-hyper|rot-general|aff-minkowski|
                      // aff-harmonic|aff-psi|aff-general|aff-classical
  int j = 1;
  int k = 0;
  int r = 0;
  int s = 0;
  /// Minkowski variant for aff-minkowski: auto|general|r0|kj1.
  std::string variant = "auto";
  /// Psi for the psi routes: minkowski (default), constant, norm_power.
  std::string psi = "minkowski";
  double psi_param = 1.0;
  long samples = 20000;
  std::uint64_t seed = 0;
  int section_order = 32;
  RhsConfig rhs;
  double ci = 3.0;
  double atol = 1e-4;
  /// Relative error cap on coordinates with |rhs| > rel_floor; 0 disables.
  double max_rel_err = 0.0;
  double rel_floor = 1e-3;

  static ExperimentSpec from_json(std::string_view text);
  std::string to_json() const;
};

struct VerificationReport {
  std::string name;
  std::string route;
  std::string body_kind;
  int dim = 0;
  /// "ok" or "error".
  std::string status = "ok";
  std::string error_type;
  std::string error;
  ExperimentSpec spec;
  std::optional<Estimate> lhs;
  std::optional<RhsValue> rhs;
  std::vector<double> z;
  std::vector<double> rel_err;
  double z_max = 0.0;
  /// Index of the coordinate with the largest |lhs - rhs| / tolerance.
  std::size_t worst = 0;
  bool pass = false;
  double runtime_s = 0.0;

  /// Runtime is kept out of the JSON so that reruns are byte-identical.
  std::string to_json() const;
};

/// Builds the psi of an experiment.
PsiFunction make_psi(const ExperimentSpec& spec, int dim);

bool is_rotational(const std::string& route);
/// Sectional functional whose section integral a route evaluates.
Functional route_functional(const ExperimentSpec& spec, int dim);
/// Right-hand side of a route.
RhsValue evaluate_rhs(const ConvexBody& body, const ExperimentSpec& spec, const RhsConfig& cfg);

/// Pairs the LHS estimator of a route with its RHS evaluator. Capability and
/// validation errors are reported, not thrown. With keep_samples the
/// per-sample values are kept in lhs->values.
VerificationReport verify(const ConvexBody& body, const ExperimentSpec& spec, int workers = 0,
                          bool keep_samples = false);

}  // namespace crofton
