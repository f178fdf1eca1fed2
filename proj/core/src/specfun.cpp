#include "crofton/specfun.hpp"

#include "crofton/errors.hpp"
#include "crofton/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace crofton {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSeriesTol = 1e-16;
constexpr int kSeriesCap = 10000;
constexpr int kSeriesQuiet = 3;
// Above this |z| a non-terminating 2F1 is evaluated through 1 - z.
constexpr double kConnectionThreshold = 0.9;

bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::round(x); }

double gamma_sign(double x) {
  if (x > 0.0) return 1.0;
  const auto f = static_cast<long long>(std::floor(x));
  return (f % 2 == 0) ? 1.0 : -1.0;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

// Sums sum_n t_n where t_{n+1} = t_n * ratio(n). Stops after kSeriesQuiet
// consecutive negligible terms, or at n = last when last >= 0.
template <typename Ratio>
double sum_series(Ratio&& ratio, long last, const char* what) {
  double term = 1.0;
  double sum = 1.0;
  int quiet = 0;
  for (long n = 0;; ++n) {
    if (last >= 0 && n >= last) return sum;
    if (n >= kSeriesCap)
      throw ConvergenceError(std::string(what) +
                             ": series did not converge within 10000 terms");
    term *= ratio(n);
    sum += term;
    if (last < 0) {
      if (std::abs(term) <= kSeriesTol * std::abs(sum)) {
        if (++quiet >= kSeriesQuiet) return sum;
      } else {
        quiet = 0;
      }
    }
  }
}

// Non-terminating 2F1 for 0.9 < z < 1 through the 1 - z connection formulas,
// including the logarithmic cases when c - a - b is an integer.
double hyp2f1_connection(double a, double b, double c, double z) {
  const double w = 1.0 - z;
  const double s = c - a - b;
  const double m_round = std::round(s);
  if (std::abs(s - m_round) > 1e-9) {
    const double t1 = std::tgamma(c) * std::tgamma(s) *
                      reciprocal_gamma(c - a) * reciprocal_gamma(c - b);
    const double t2 = std::tgamma(c) * std::tgamma(-s) * reciprocal_gamma(a) *
                      reciprocal_gamma(b);
    double v = 0.0;
    if (t1 != 0.0) v += t1 * hyp_pfq({{a, b}, {1.0 - s}}, w);
    if (t2 != 0.0) v += t2 * std::pow(w, s) * hyp_pfq({{c - a, c - b}, {1.0 + s}}, w);
    return v;
  }
  const int m = static_cast<int>(m_round);
  const double log_w = std::log(w);

  // sum_n coef_n w^n [log w - psi(n+1) - psi(n+|m|+1) + psi(pa+n) + psi(pb+n)]
  auto log_series = [&](double pa, double pb, int mm) {
    double coef = 1.0;  // (pa)_n (pb)_n / (n! (n+mm)!) * mm!
    double sum = 0.0;
    int quiet = 0;
    for (int n = 0; n < kSeriesCap; ++n) {
      if (n > 0) coef *= (pa + n - 1) * (pb + n - 1) / (n * double(n + mm)) * w;
      const double bracket = log_w - digamma(n + 1.0) - digamma(n + mm + 1.0) +
                             digamma(pa + n) + digamma(pb + n);
      const double term = coef * bracket;
      sum += term;
      if (std::abs(term) <= kSeriesTol * std::abs(sum)) {
        if (++quiet >= kSeriesQuiet) break;
      } else {
        quiet = 0;
      }
    }
    double mfact = 1.0;
    for (int i = 2; i <= mm; ++i) mfact *= i;
    return sum / mfact;
  };

  if (m == 0) {
    const double pre = std::tgamma(a + b) * reciprocal_gamma(a) * reciprocal_gamma(b);
    return -pre * log_series(a, b, 0);
  }
  if (m > 0) {
    // c = a + b + m
    double finite = 0.0;
    double term = 1.0;
    for (int n = 0; n < m; ++n) {
      finite += term;
      term *= (a + n) * (b + n) / ((n + 1.0) * (1.0 - m + n)) * w;
    }
    const double pre1 = std::tgamma(double(m)) * std::tgamma(a + b + m) *
                        reciprocal_gamma(a + m) * reciprocal_gamma(b + m);
    const double pre2 = std::pow(-w, m) * std::tgamma(a + b + m) *
                        reciprocal_gamma(a) * reciprocal_gamma(b);
    return pre1 * finite - pre2 * log_series(a + m, b + m, m);
  }
  // c = a + b - mp
  const int mp = -m;
  double finite = 0.0;
  double term = 1.0;
  for (int n = 0; n < mp; ++n) {
    finite += term;
    term *= (a - mp + n) * (b - mp + n) / ((n + 1.0) * (1.0 - mp + n)) * w;
  }
  const double pre1 = std::tgamma(double(mp)) * std::tgamma(a + b - mp) *
                      reciprocal_gamma(a) * reciprocal_gamma(b) * std::pow(w, -mp);
  const double sign = (mp % 2 == 0) ? 1.0 : -1.0;
  const double pre2 = sign * std::tgamma(a + b - mp) * reciprocal_gamma(a - mp) *
                      reciprocal_gamma(b - mp);
  return pre1 * finite - pre2 * log_series(a, b, mp);
}

void require(bool ok, const std::string& message) {
  if (!ok) throw DomainError(message);
}

}  // namespace

double sphere_area(int k) {
  require(k >= 1, "sphere_area: k must be >= 1, got " + std::to_string(k));
  return 2.0 * std::pow(kPi, 0.5 * k) / std::tgamma(0.5 * k);
}

double ball_volume(int k) {
  require(k >= 0, "ball_volume: k must be >= 0");
  return std::pow(kPi, 0.5 * k) / std::tgamma(0.5 * k + 1.0);
}

double grassmann_total(int d, int j) {
  require(d >= 0 && j >= 0 && j <= d,
          "grassmann_total: need 0 <= j <= d, got d=" + std::to_string(d) +
              " j=" + std::to_string(j));
  double c = 1.0;
  for (int i = 0; i < j; ++i) c *= sphere_area(d - i) / sphere_area(i + 1);
  return c;
}

double pochhammer(double a, int n) {
  require(n >= 0, "pochhammer: n must be >= 0");
  double v = 1.0;
  for (int i = 0; i < n; ++i) v *= a + i;
  return v;
}

double log_abs_gamma(double x) {
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

double reciprocal_gamma(double x) {
  if (is_nonpositive_integer(x)) return 0.0;
  if (x > 0.0 && x < 170.0) return 1.0 / std::tgamma(x);
  return gamma_sign(x) * std::exp(-log_abs_gamma(x));
}

double digamma(double x) {
  if (is_nonpositive_integer(x))
    throw DomainError("digamma: pole at " + fmt(x));
  double result = 0.0;
  if (x < 0.0) {
    // Reflection: psi(1 - x) - psi(x) = pi cot(pi x)
    return digamma(1.0 - x) - kPi / std::tan(kPi * x);
  }
  while (x < 6.0) {
    result -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  result += std::log(x) - 0.5 * inv -
            inv2 * (1.0 / 12 - inv2 * (1.0 / 120 - inv2 * (1.0 / 252 - inv2 *
                   (1.0 / 240 - inv2 * (1.0 / 132)))));
  return result;
}

double gamma_ratio(const std::vector<double>& num,
                   const std::vector<double>& den) {
  double log_sum = 0.0;
  double sign = 1.0;
  for (double x : num) {
    if (is_nonpositive_integer(x))
      throw DomainError("gamma_ratio: numerator pole at " + fmt(x));
    log_sum += log_abs_gamma(x);
    sign *= gamma_sign(x);
  }
  for (double x : den) {
    if (is_nonpositive_integer(x)) return 0.0;
    log_sum -= log_abs_gamma(x);
    sign *= gamma_sign(x);
  }
  return sign * std::exp(log_sum);
}

double hyp_pfq(const HypParams& params, double z) {
  const auto& up = params.upper;
  const auto& lo = params.lower;

  long last = -1;
  bool lower_pole = false;
  double worst_lower = 0.0;
  for (double b : lo) {
    if (is_nonpositive_integer(b)) {
      if (!lower_pole || b > worst_lower) worst_lower = b;
      lower_pole = true;
    }
  }
  double best_upper = 1.0;
  bool upper_int = false;
  for (double a : up) {
    if (is_nonpositive_integer(a) && (!lower_pole || a >= worst_lower)) {
      if (!upper_int || a > best_upper) best_upper = a;
      upper_int = true;
    }
  }
  if (lower_pole && !upper_int)
    throw DomainError(
        "hyp_pfq: lower parameter " + fmt(worst_lower) +
        " is a non-positive integer with no admissible terminating upper "
        "parameter");
  if (upper_int) last = static_cast<long>(-best_upper);

  auto ratio = [&](long n) {
    double r = z / (n + 1.0);
    for (double a : up) r *= a + n;
    for (double b : lo) r /= b + n;
    return r;
  };

  if (last >= 0) return sum_series(ratio, last, "hyp_pfq");

  if (up.size() > lo.size() + 1)
    throw DomainError("hyp_pfq: p > q + 1 diverges for every z != 0");
  if (up.size() == lo.size() + 1) {
    if (std::abs(z) > 1.0)
      throw DomainError("hyp_pfq: |z| > 1 outside the disc of convergence");
    if (z == 1.0) {
      double excess = 0.0;
      for (double b : lo) excess += b;
      for (double a : up) excess -= a;
      if (excess <= 0.0)
        throw ConvergenceError(
            "hyp_pfq: series diverges at z = 1 (sum(lower) - sum(upper) = " +
            fmt(excess) + ")");
      if (up.size() == 2) return gauss_at_one(up[0], up[1], lo[0]);
    } else if (z == -1.0) {
      throw DomainError("hyp_pfq: z = -1 is not supported");
    } else if (up.size() == 2 && z > kConnectionThreshold) {
      return hyp2f1_connection(up[0], up[1], lo[0], z);
    }
  }
  return sum_series(ratio, -1, "hyp_pfq");
}

double hyp2f1(double a, double b, double c, double z) {
  return hyp_pfq({{a, b}, {c}}, z);
}

double gauss_at_one(double a, double b, double c) {
  if (!(c > a + b))
    throw DomainError("gauss_at_one: need c > a + b, got a=" + fmt(a) +
                      " b=" + fmt(b) + " c=" + fmt(c));
  return gamma_ratio({c, c - a - b}, {c - a, c - b});
}

double f_integral(int d, int j, int s, int l, int b, double m) {
  require(1 < j && j < d, "f_integral: need 1 < j < d");
  require(s >= 0 && l >= 0 && b >= 0, "f_integral: s, l, b must be >= 0");
  require(m >= 0.0 && m <= 1.0, "f_integral: m must lie in [0, 1]");
  const double pre = sphere_area(d - 1 + 2 * b + 4 * l) /
                     (sphere_area(j - 1 + 2 * b + 2 * l) *
                      sphere_area(d - j + 2 * l));
  return pre * hyp2f1(0.5 * (s - 1), 0.5 * (d - j + 2 * l),
                      0.5 * (d - 1 + 2 * b + 4 * l), m);
}

double elliptic_k(double m) {
  require(m >= 0.0 && m < 1.0, "elliptic_k: m must lie in [0, 1)");
  double a = 1.0;
  double g = std::sqrt(1.0 - m);
  for (int i = 0; i < 64 && std::abs(a - g) > 1e-16 * a; ++i) {
    const double an = 0.5 * (a + g);
    g = std::sqrt(a * g);
    a = an;
  }
  return kPi / (2.0 * a);
}

double elliptic_e(double m) {
  require(m >= 0.0 && m <= 1.0, "elliptic_e: m must lie in [0, 1]");
  if (m == 1.0) return 1.0;
  double a = 1.0;
  double g = std::sqrt(1.0 - m);
  double c = std::sqrt(m);
  double sum = 0.5 * c * c;
  double pow2 = 0.5;
  for (int i = 0; i < 64 && std::abs(c) > 1e-17; ++i) {
    const double an = 0.5 * (a + g);
    c = 0.5 * (a - g);
    g = std::sqrt(a * g);
    a = an;
    pow2 *= 2.0;
    sum += pow2 * c * c;
  }
  return kPi / (2.0 * a) * (1.0 - sum);
}

double c_affine(int d, int j, int k) {
  require(0 <= k && k < j && j < d, "c_affine: need 0 <= k < j < d");
  double binom = 1.0;
  for (int i = 1; i <= k; ++i) binom = binom * (d - j - 1 + i) / i;
  return grassmann_total(d, j) * binom *
         gamma_ratio({0.5 * (j + 1), 0.5 * (d - j + 1)}, {}) /
         std::pow(kPi, 0.5 * d);
}

double chi_without_sigma(int d, int j, int k, int s, int p) {
  require(s >= 0 && p >= 0, "chi: s and p must be >= 0");
  if (2 * p > s) return 0.0;
  double pfact = 1.0;
  for (int i = 2; i <= p; ++i) pfact *= i;
  double sum = 0.0;
  for (int b = 0; b <= s / 2 - p; ++b) {
    double binom = 1.0;  // binomial(s - 2p, 2b)
    for (int i = 1; i <= 2 * b; ++i) binom = binom * (s - 2 * p - 2 * b + i) / i;
    sum += ((b % 2) ? -1.0 : 1.0) * binom *
           gamma_ratio({0.5 * (2 * b + 1), 0.5 * (k + 2 + s - 2 * b - 2 * p),
                        0.5 * (d - j + 2 * b + 2 * p)},
                       {0.5 * (2 * b + 2 * p + d + 1)});
  }
  return sum / (std::pow(4.0, p) * pfact * std::sqrt(kPi));
}

ChiForms chi_forms(int d, int j, int k, int s, int p) {
  require(0 <= k && k < j && j < d, "chi: need 0 <= k < j < d");
  require(s >= 0 && p >= 0, "chi: s and p must be >= 0");
  ChiForms f;
  if (2 * p > s) return f;
  const double sigma = sphere_area(j - k + s - 2 * p);
  f.finite_sum = sigma * chi_without_sigma(d, j, k, s, p);

  double pfact = 1.0;
  for (int i = 2; i <= p; ++i) pfact *= i;
  const double pre = sigma *
                     gamma_ratio({0.5 * (k + 2 + s - 2 * p), 0.5 * (d - j + 2 * p)},
                                 {0.5 * (2 * p + d + 1)}) /
                     (pfact * std::pow(4.0, p));
  double psum = 0.0;
  for (int b = 0; b <= s / 2 - p; ++b) {
    psum += pochhammer(-0.5 * (s - 2 * p), b) *
            pochhammer(-0.5 * (s - 2 * p - 1), b) *
            pochhammer(0.5 * (d - j + 2 * p), b) /
            (pochhammer(1.0, b) * pochhammer(0.5 * (2 * p + d + 1), b) *
             pochhammer(-0.5 * (k + s - 2 * p), b));
  }
  f.pochhammer_sum = pre * psum;
  f.hypergeometric =
      pre * hyp_pfq({{0.5 * (2 * p - s + 1), 0.5 * (2 * p - s),
                      0.5 * (d - j + 2 * p)},
                     {0.5 * (2 * p - k - s), 0.5 * (2 * p + d + 1)}},
                    1.0);
  return f;
}

double chi_constant(int d, int j, int k, int s, int p) {
  const ChiForms f = chi_forms(d, j, k, s, p);
  const double scale = std::max(1.0, std::abs(f.finite_sum));
  if (std::abs(f.finite_sum - f.pochhammer_sum) > 1e-10 * scale ||
      std::abs(f.finite_sum - f.hypergeometric) > 1e-10 * scale)
    throw std::logic_error("chi_constant: closed forms disagree");
  return f.finite_sum;
}

double legendre_pd(int s, int d, double t) {
  require(d >= 2, "legendre_pd: d must be >= 2");
  require(s >= 0, "legendre_pd: s must be >= 0");
  require(t >= -1.0 && t <= 1.0, "legendre_pd: t must lie in [-1, 1]");
  if (s == 0) return 1.0;
  double prev = 1.0;
  double cur = t;
  for (int n = 1; n < s; ++n) {
    const double next = ((2.0 * n + d - 2) * t * cur - n * prev) / (n + d - 2.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

double a_constant(int s, int j, int d) {
  require(d >= 3, "a_constant: d must be >= 3");
  require(1 <= j && j < d, "a_constant: need 1 <= j < d");
  require(s >= 0, "a_constant: s must be >= 0");
  double value;
  if (s % 2 == 0) {
    const int m = s / 2;
    value = ((m % 2) ? -1.0 : 1.0) * std::pow(kPi, 0.5 * (d - 2)) *
            gamma_ratio({0.5 * (2 * m + 1), 0.5 * (d - j), 0.5 * (j + 1)},
                        {0.5 * (2 * m + d - 1), 0.5 * (d + 1)}) *
            hyp_pfq({{double(-m), 0.5 * (2 * m + d - 2), 0.5 * (j + 1)},
                     {0.5, 0.5 * (d + 1)}},
                    1.0);
  } else {
    const int m = (s - 1) / 2;
    value = ((m % 2) ? -1.0 : 1.0) * 2.0 * std::pow(kPi, 0.5 * (d - 2)) *
            gamma_ratio({0.5 * (2 * m + 3), 0.5 * (d - j), 0.5 * (j + 2)},
                        {0.5 * (2 * m + d - 1), 0.5 * (d + 2)}) *
            hyp_pfq({{double(-m), 0.5 * (2 * m + d), 0.5 * (j + 2)},
                     {1.5, 0.5 * (d + 2)}},
                    1.0);
  }
  return value / sphere_area(d - 1);
}

double a_constant_quadrature(int s, int j, int d) {
  require(d >= 3, "a_constant_quadrature: d must be >= 3");
  require(1 <= j && j < d, "a_constant_quadrature: need 1 <= j < d");
  const double e = 0.5 * (d - j - 2);
  // t = (1 + x)/2 and (1 - t^2)^e = (1 - t)^e (1 + t)^e; Jacobi weight on (1-t).
  const QuadratureRule rule = gauss_jacobi(48, e, 0.0);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double t = 0.5 * (1.0 + rule.nodes[i]);
    sum += rule.weights[i] * std::pow(1.0 + t, e) * std::pow(t, j) *
           legendre_pd(s, d, t);
  }
  return sum * std::pow(0.5, e + 1.0);
}

}  // namespace crofton
