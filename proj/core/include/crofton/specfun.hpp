#pragma once

#include <vector>

namespace crofton {

/// sigma_k = 2 pi^{k/2} / Gamma(k/2), the surface area of S^{k-1}.
double sphere_area(int k);

/// kappa_k = pi^{k/2} / Gamma(k/2 + 1), the volume of the unit k-ball.
double ball_volume(int k);

/// c_{d,j} = sigma_d ... sigma_{d-j+1} / (sigma_j ... sigma_1), the total
/// rotation invariant measure of the Grassmannian of j-subspaces of R^d.
double grassmann_total(int d, int j);

/// Pochhammer symbol (a)_n.
double pochhammer(double a, int n);

double log_abs_gamma(double x);
/// 1 / Gamma(x), zero at the poles.
double reciprocal_gamma(double x);
double digamma(double x);

/// prod Gamma(num_i) / prod Gamma(den_i), evaluated in log space.
/// Throws DomainError if a numerator argument is a pole; a denominator pole
/// makes the ratio zero.
double gamma_ratio(const std::vector<double>& num,
                   const std::vector<double>& den);

struct HypParams {
  std::vector<double> upper;
  std::vector<double> lower;
};

/// Generalized hypergeometric series pFq(upper; lower; z).
///
/// Termination rule: if some lower parameter is a non-positive integer, let b
/// be the largest such; the series is defined only when an integer upper
/// parameter a with b <= a <= 0 exists, and is then summed up to n = -a. This
/// also covers a = b, which common libraries treat as undefined.
/// Non-terminating series need p = q + 1 and |z| < 1, or z = 1 with
/// sum(lower) - sum(upper) > 0. The z = 1 value of a non-terminating 2F1
/// comes from Gauss's theorem; 2F1 with z > 0.9 uses the 1 - z connection
/// formulas.
double hyp_pfq(const HypParams& params, double z);

double hyp2f1(double a, double b, double c, double z);

/// Gauss's theorem: 2F1(a, b; c; 1) for c > a + b.
double gauss_at_one(double a, double b, double c);

/// F_{d,j,s,l,b}(m) with m = alpha^2 in [0, 1]; 1 < j < d.
/// At m = 1 returns the Gauss limit, throwing if the integral diverges.
double f_integral(int d, int j, int s, int l, int b, double m);

/// Complete elliptic integrals with parameter m (K(m) = int dθ/sqrt(1-m sin²θ)).
double elliptic_k(double m);
double elliptic_e(double m);

/// C_{d,j,k} for 0 <= k < j < d.
double c_affine(int d, int j, int k);

/// The three closed forms of chi^p_{d,j,k,s}: finite b-sum, Pochhammer sum,
/// and terminating 3F2.
struct ChiForms {
  double finite_sum = 0.0;
  double pochhammer_sum = 0.0;
  double hypergeometric = 0.0;
};
ChiForms chi_forms(int d, int j, int k, int s, int p);

/// chi^p_{d,j,k,s}; zero when p > s/2. Computes all three representations
/// and throws std::logic_error if they disagree by more than 1e-10.
double chi_constant(int d, int j, int k, int s, int p);

/// chi with the leading sigma factor removed; defined for the shifted index
/// sets (d-2, j-2, j-1) used by the k = j-1 affine formula.
double chi_without_sigma(int d, int j, int k, int s, int p);

/// Legendre polynomial P_s^d of dimension d >= 2 and degree s, P_s^d(1) = 1.
double legendre_pd(int s, int d, double t);

/// a_{s,j,d} = int_0^1 (1-t^2)^{(d-j-2)/2} t^j P_s^d(t) dt via its closed
/// 3F2 form; d >= 3, 1 <= j < d.
double a_constant(int s, int j, int d);

/// The same constant by Gauss-Jacobi quadrature of its defining integral.
double a_constant_quadrature(int s, int j, int d);

}  // namespace crofton
