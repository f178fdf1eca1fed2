#include "crofton/crofton.hpp"

#include "crofton/errors.hpp"
#include "crofton/quadrature.hpp"
#include "crofton/rng.hpp"
#include "crofton/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>

namespace crofton {
namespace {

constexpr double kPi = std::numbers::pi;

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

double multinomial(std::initializer_list<int> parts) {
  int total = 0;
  double denom = 1.0;
  for (int p : parts) {
    total += p;
    denom *= factorial(p);
  }
  return factorial(total) / denom;
}

double sign_pow(int e) { return e % 2 ? -1.0 : 1.0; }

SymTensor power_of(const SymTensor& t, int p) {
  SymTensor out = SymTensor::scalar(1.0, t.dim());
  for (int i = 0; i < p; ++i) out = sym_product(out, t);
  return out;
}

/// Calls fn(subset) for every size-m subset of {0, ..., n-1}.
template <typename Fn>
void for_each_subset(int n, int m, Fn&& fn) {
  std::vector<int> idx(m);
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == m) {
      fn(idx);
      return;
    }
    for (int i = start; i <= n - (m - depth); ++i) {
      idx[depth] = i;
      rec(i + 1, depth + 1);
    }
  };
  rec(0, 0);
}

/// Curvature factor prod_{i in I} kappa_i and A_I = span{a_i : i not in I}
/// for every |I| = m.
struct CurvatureSubsets {
  std::vector<double> products;
  std::vector<LinearFlat> spans;
};

CurvatureSubsets curvature_subsets(const SupportSample& smp, int m) {
  const int dm1 = static_cast<int>(smp.kappas.size());
  CurvatureSubsets out;
  for_each_subset(dm1, m, [&](const std::vector<int>& subset) {
    double prod = 1.0;
    std::vector<bool> in(dm1, false);
    for (int i : subset) {
      prod *= smp.kappas[i];
      in[i] = true;
    }
    Matrix frame(smp.x.size(), dm1 - m);
    for (int i = 0, c = 0; i < dm1; ++i)
      if (!in[i]) frame.col(c++) = smp.dirs.col(i);
    out.products.push_back(prod);
    out.spans.emplace_back(std::move(frame));
  });
  return out;
}

/// sum_i e_m(kappa without i) a_i^2.
SymTensor tangential_metric(const SupportSample& smp, int m) {
  const int d = static_cast<int>(smp.x.size());
  const int dm1 = static_cast<int>(smp.kappas.size());
  SymTensor g(d, 2);
  for (int i = 0; i < dm1; ++i) {
    Vector others(std::max(0, dm1 - 1));
    for (int q = 0, c = 0; q < dm1; ++q)
      if (q != i) others[c++] = smp.kappas[q];
    const double e = elementary_symmetric(others, m);
    if (e != 0.0) accumulate_power_product(g, smp.dirs.col(i), 2, smp.n, 0, e);
  }
  return g;
}

/// Running mean and variance of tensor samples (Welford).
struct TensorStats {
  SymTensor mean;
  SymTensor m2;
  long count = 0;

  TensorStats(int dim, int rank) : mean(dim, rank), m2(dim, rank) {}

  void add(const SymTensor& v) {
    ++count;
    for (std::size_t i = 0; i < mean.size(); ++i) {
      const double delta = v[i] - mean[i];
      mean[i] += delta / count;
      m2[i] += delta * (v[i] - mean[i]);
    }
  }
  double variance_of_mean(std::size_t i) const {
    return count > 1 ? m2[i] / (count - 1) / count : 0.0;
  }
};

void require_smooth(const ConvexBody& body, const char* what) {
  if (!body.is_smooth())
    throw UnsupportedError(std::string(what) + " is implemented for smooth bodies only");
}

void require_range(int d, int j, int k) {
  if (!(0 <= k && k < j && j < d)) throw DomainError("need 0 <= k < j < d");
}

RhsValue finish(SymTensor value, const SymTensor& var) {
  SymTensor se(var.dim(), var.rank());
  for (std::size_t i = 0; i < var.size(); ++i) se[i] = std::sqrt(std::max(0.0, var[i]));
  return {std::move(value), std::move(se)};
}

RhsValue exact(SymTensor value) {
  SymTensor se(value.dim(), value.rank());
  return {std::move(value), std::move(se)};
}

}  // namespace

PsiFunction PsiFunction::constant(int dim, double value) {
  PsiFunction psi;
  psi.dim = dim;
  psi.rank = 0;
  psi.uses_n = false;
  psi.fn = [dim, value](const LinearFlat&, const Vector&, const Vector&) {
    return SymTensor::scalar(value, dim);
  };
  return psi;
}

PsiFunction PsiFunction::minkowski(int dim, int j, int k, int r, int s) {
  if (!(0 <= k && k < j)) throw DomainError("minkowski psi: need 0 <= k < j");
  const double scale =
      sphere_area(j - k) / (factorial(r) * factorial(s) * sphere_area(j - k + s));
  PsiFunction psi;
  psi.dim = dim;
  psi.rank = r + s;
  psi.uses_n = s > 0;
  psi.fn = [dim, r, s, scale](const LinearFlat&, const Vector& x, const Vector& n) {
    SymTensor t(dim, r + s);
    accumulate_power_product(t, x, r, n, s, scale);
    return t;
  };
  return psi;
}

PsiFunction PsiFunction::norm_power(int dim, double p) {
  PsiFunction psi;
  psi.dim = dim;
  psi.rank = 0;
  psi.uses_n = false;
  psi.fn = [dim, p](const LinearFlat&, const Vector& x, const Vector&) {
    return SymTensor::scalar(std::pow(x.norm(), p), dim);
  };
  return psi;
}

std::vector<SupportSample> boundary_nodes(const ConvexBody& body, const RhsConfig& cfg) {
  if (const Polytope* p = body.polytope())
    return facet_cubature(*p, cfg.facet_order, cfg.facet_levels);
  return boundary_cubature(body, cfg.order);
}

RhsValue rot_rhs_general(const ConvexBody& body, const PsiFunction& psi, int j, int k,
                         const RhsConfig& cfg) {
  const int d = body.dim();
  require_range(d, j, k);
  require_smooth(body, "rot_rhs_general");
  validate_rotational(body);
  const int inner = j == 1 ? 1 : std::max(2, cfg.inner_samples);
  const double mass = grassmann_total(d - 1, j - 1);
  SymTensor value(d, psi.rank);
  SymTensor var(d, psi.rank);
  const auto nodes = boundary_cubature(body, cfg.order);
  for (std::size_t node = 0; node < nodes.size(); ++node) {
    const SupportSample& smp = nodes[node];
    const double rx = smp.x.norm();
    const CurvatureSubsets subsets = curvature_subsets(smp, j - 1 - k);
    const LinearFlat xperp(LinearFlat(Matrix(smp.x / rx)).complement());
    Rng rng(cfg.seed, node);
    TensorStats stats(d, psi.rank);
    for (int m = 0; m < inner; ++m) {
      const LinearFlat lx = span_with(sample_linear_within(xperp, j - 1, rng), smp.x);
      const Vector pn = project(smp.n, lx);
      const double pnorm = pn.norm();
      if (pnorm < 1e-14) {
        stats.add(SymTensor(d, psi.rank));
        continue;
      }
      double geo = 0.0;
      for (std::size_t i = 0; i < subsets.products.size(); ++i) {
        const double g = generalized_sine(lx, subsets.spans[i]);
        geo += subsets.products[i] * g * g;
      }
      SymTensor val = psi(lx, smp.x, pn / pnorm);
      val *= geo / std::pow(pnorm, j - k);
      stats.add(val);
    }
    const double factor = smp.weight * mass * std::pow(rx, j - d) / sphere_area(j - k);
    value.add_scaled(stats.mean, factor);
    for (std::size_t i = 0; i < var.size(); ++i)
      var[i] += factor * factor * stats.variance_of_mean(i);
  }
  return finish(std::move(value), var);
}

RhsValue rot_rhs_surface(const ConvexBody& body, int j, int r, int s, const RhsConfig& cfg) {
  const int d = body.dim();
  if (!(1 < j && j < d)) throw DomainError("rot_rhs_surface: need 1 < j < d");
  if (r + s > kMaxRank) throw DomainError("tensor rank exceeds the cap of 8");
  validate_rotational(body);
  const double pref = sphere_area(1) * grassmann_total(d - 3, j - 2) /
                      (factorial(r) * factorial(s) * sphere_area(s + 1));
  std::vector<SymTensor> parts;
  for (int p = 0; 2 * p <= s; ++p) parts.emplace_back(d, r + s - 2 * p);
  for (const SupportSample& smp : boundary_nodes(body, cfg)) {
    const double rx = smp.x.norm();
    const double xn = smp.x.dot(smp.n);
    double alpha2 = std::clamp(1.0 - xn * xn / (rx * rx), 0.0, 1.0);
    const bool at_one = std::abs(1.0 - alpha2) < 1e-10;
    if (at_one) alpha2 = 1.0;
    if (alpha2 < 1e-10) alpha2 = 0.0;
    // Lambda_{d-1} is half the boundary measure.
    const double w = 0.5 * smp.weight * pref;
    std::map<std::pair<int, int>, double> f_cache;
    auto f_value = [&](int l, int b) {
      auto key = std::make_pair(l, b);
      auto it = f_cache.find(key);
      if (it == f_cache.end()) it = f_cache.emplace(key, f_integral(d, j, s, l, b, alpha2)).first;
      return it->second;
    };
    for (int l = 0; 2 * l <= s; ++l) {
      for (int a = 0; a <= s - 2 * l; ++a) {
        for (int b = 0; a + b <= s - 2 * l; ++b) {
          const int c = s - 2 * l - a - b;
          if (at_one && a + b > 0) continue;
          const double outer = multinomial({a, b, c, 2 * l}) * sphere_area(2 * l + d - 2) /
                               sphere_area(2 * l + 1) * f_value(l, b + c);
          for (int p = 0; p <= l; ++p) {
            for (int q = 0; p + q <= l; ++q) {
              for (int t = 0; p + q + t <= l; ++t) {
                const int v = l - p - q - t;
                if (at_one && t > 0) continue;
                const double inner = multinomial({p, q, t, v}) * sign_pow(q + v + b) *
                                     std::pow(2.0, t + 1) * std::pow(alpha2, p) *
                                     std::pow(xn, a + b + t) /
                                     std::pow(rx, d - j + 2 * a + 2 * b + 2 * v + 2 * t);
                const double coef = w * outer * inner;
                if (coef == 0.0) continue;
                accumulate_power_product(parts[p], smp.x, r + a + b + 2 * v + t, smp.n,
                                         c + 2 * q + t, coef);
              }
            }
          }
        }
      }
    }
  }
  SymTensor out(d, r + s);
  for (int p = 0; 2 * p <= s; ++p) out += sym_product(metric_power(d, p), parts[p]);
  return exact(std::move(out));
}

RhsValue rot_rhs_lines(const ConvexBody& body, int r, int s, const RhsConfig& cfg) {
  const int d = body.dim();
  if (r + s > kMaxRank) throw DomainError("tensor rank exceeds the cap of 8");
  validate_rotational(body);
  const double pref = 1.0 / (factorial(r) * factorial(s) * sphere_area(s + 1));
  SymTensor out(d, r + s);
  for (const SupportSample& smp : boundary_nodes(body, cfg)) {
    const double xn = smp.x.dot(smp.n);
    if (xn == 0.0) continue;
    const double rx = smp.x.norm();
    const double sgn = (xn < 0.0 && s % 2) ? -1.0 : 1.0;
    accumulate_power_product(out, smp.x, r + s, smp.n, 0,
                             pref * smp.weight * sgn * std::abs(xn) / std::pow(rx, d + s));
  }
  return exact(std::move(out));
}

RhsValue rot_rhs_hyperplanes(const ConvexBody& body, int k, int r, int s, const RhsConfig& cfg) {
  const int d = body.dim();
  if (d < 3 || k < 0 || k >= d - 2)
    throw DomainError("rot_rhs_hyperplanes: need 0 <= k < d-2 (use rot_rhs_surface for k = d-2)");
  if (r + s > kMaxRank) throw DomainError("tensor rank exceeds the cap of 8");
  require_smooth(body, "rot_rhs_hyperplanes");
  validate_rotational(body);
  const double pref = 1.0 / (2.0 * factorial(r) * factorial(s) * sphere_area(d - 1 - k + s));
  const double a_hyp = 0.5 * (d - 1 - k + s);
  SymTensor out(d, r + s);
  for (const SupportSample& smp : boundary_cubature(body, cfg.order)) {
    const double rx = smp.x.norm();
    const Vector xhat = smp.x / rx;
    const Vector nperp = smp.n - smp.n.dot(xhat) * xhat;
    const double alpha = nperp.norm();
    const double alpha2 = alpha * alpha;
    if (1.0 - alpha2 < 1e-12) continue;  // x ⟂ n: a null set of the boundary
    const Matrix xperp = LinearFlat(Matrix(xhat)).complement();
    const Vector v = alpha < 1e-7 ? Vector(xperp.col(0)) : Vector(nperp / alpha);
    Matrix xv(d, 2);
    xv.col(0) = xhat;
    xv.col(1) = v;
    const SymTensor qperp = metric_tensor(LinearFlat::from_spanning(xv).complement());
    const SymTensor g = tangential_metric(smp, d - 2 - k);
    for (int b = 0; b <= s; ++b) {
      const int a = s - b;
      if (b > 0 && alpha < 1e-7) continue;  // alpha^b factor
      SymTensor jb(d, b + 2);
      for (int p = 0; 2 * p <= b + 2; ++p) {
        const int q = b + 2 - 2 * p;
        const double coef =
            2.0 * std::pow(alpha, b) * binomial(b + 2, 2 * p) * sphere_area(2 * p + d - 2) /
            sphere_area(2 * p + 1) *
            gamma_ratio({0.5 * (b + q + 1), 0.5 * (2 * p + d - 2)}, {0.5 * (2 * b + d + 1)}) *
            hyp2f1(a_hyp, 0.5 * (b + q + 1), 0.5 * (2 * b + 1 + d), alpha2);
        jb.add_scaled(sym_product(vector_power(v, q), power_of(qperp, p)), coef);
      }
      SymTensor contr = contract(jb, g);
      SymTensor na(d, a);
      accumulate_power_product(na, smp.x, 0, smp.n, a, 1.0);
      accumulate_power_times(out, smp.x, r, sym_product(na, contr),
                             pref * binomial(s, a) * sign_pow(b) * smp.weight / rx);
    }
  }
  return exact(std::move(out));
}

RhsValue aff_rhs_general(const ConvexBody& body, const PsiFunction& psi, int j, int k,
                         const RhsConfig& cfg) {
  const int d = body.dim();
  require_range(d, j, k);
  require_smooth(body, "aff_rhs_general");
  const int inner = std::max(2, cfg.inner_samples);
  const double mass = grassmann_total(d, j);
  SymTensor value(d, psi.rank);
  SymTensor var(d, psi.rank);
  const auto nodes = boundary_cubature(body, cfg.order);
  for (std::size_t node = 0; node < nodes.size(); ++node) {
    const SupportSample& smp = nodes[node];
    const CurvatureSubsets subsets = curvature_subsets(smp, j - k - 1);
    Rng rng(cfg.seed, node);
    TensorStats stats(d, psi.rank);
    for (int m = 0; m < inner; ++m) {
      const LinearFlat l = sample_linear(d, j, rng);
      const Vector pn = project(smp.n, l);
      const double pnorm = pn.norm();
      if (pnorm < 1e-14) {
        stats.add(SymTensor(d, psi.rank));
        continue;
      }
      double geo = 0.0;
      for (std::size_t i = 0; i < subsets.products.size(); ++i) {
        const double g = generalized_sine(l, subsets.spans[i]);
        geo += subsets.products[i] * g * g;
      }
      SymTensor val = psi(l, smp.x, pn / pnorm);
      val *= geo / std::pow(pnorm, j - k);
      stats.add(val);
    }
    const double factor = smp.weight * mass / sphere_area(j - k);
    value.add_scaled(stats.mean, factor);
    for (std::size_t i = 0; i < var.size(); ++i)
      var[i] += factor * factor * stats.variance_of_mean(i);
  }
  return finish(std::move(value), var);
}

RhsValue aff_rhs_psi_xn(const ConvexBody& body, const PsiFunction& psi, int j, int k,
                        const RhsConfig& cfg) {
  const int d = body.dim();
  require_range(d, j, k);
  require_smooth(body, "aff_rhs_psi_xn");
  if (psi.uses_flat) throw DomainError("aff_rhs_psi_xn: psi must not depend on the flat");
  // ∫_0^1 f(t) (1-t^2)^e dt with t = (1+u)/2 and a Gauss-Jacobi rule in u.
  const double e = 0.5 * (d - j - 2);
  const QuadratureRule tr = gauss_jacobi(std::max(8, cfg.order / 3), e, 0.0);
  const SphereRule& wr = sphere_rule(d - 1, std::max(8, cfg.order / 2));
  const double tscale = std::pow(0.5, e + 1.0);
  const LinearFlat none(d);
  const double pref = c_affine(d, j, k) / sphere_area(j - k);
  SymTensor out(d, psi.rank);
  for (const SupportSample& smp : boundary_cubature(body, cfg.order)) {
    const int dm1 = d - 1;
    std::vector<double> el(dm1);
    for (int l = 0; l < dm1; ++l) {
      Vector others(std::max(0, dm1 - 1));
      for (int q = 0, c = 0; q < dm1; ++q)
        if (q != l) others[c++] = smp.kappas[q];
      el[l] = elementary_symmetric(others, j - k - 1);
    }
    for (std::size_t a = 0; a < tr.nodes.size(); ++a) {
      const double t = 0.5 * (1.0 + tr.nodes[a]);
      const double wt = tr.weights[a] * tscale * std::pow(1.0 + t, e) * std::pow(t, k + 1);
      const double st = std::sqrt(std::max(0.0, 1.0 - t * t));
      for (std::size_t b = 0; b < wr.weights.size(); ++b) {
        const Vector omega = wr.points.col(static_cast<Eigen::Index>(b));
        double dir = 0.0;
        for (int l = 0; l < dm1; ++l) dir += el[l] * omega[l] * omega[l];
        if (dir == 0.0) continue;
        const Vector z = t * smp.n + st * (smp.dirs * omega);
        out.add_scaled(psi(none, smp.x, z), pref * smp.weight * wt * wr.weights[b] * dir);
      }
    }
  }
  return exact(std::move(out));
}

double classical_crofton_constant(int d, int j, int k) {
  require_range(d, j, k);
  return grassmann_total(d, j) *
         gamma_ratio({0.5 * (j + 1), 0.5 * (d + k - j + 1)}, {0.5 * (k + 1), 0.5 * (d + 1)});
}

RhsValue aff_rhs_psi_x(const ConvexBody& body, const PsiFunction& psi, int j, int k,
                       const RhsConfig& cfg) {
  const int d = body.dim();
  require_range(d, j, k);
  if (psi.uses_flat || psi.uses_n)
    throw DomainError("aff_rhs_psi_x: psi must depend on the position only");
  const LinearFlat none(d);
  SymTensor out(d, psi.rank);
  for (const CurvatureNode& node : curvature_nodes(body, d - j + k, nullptr, cfg.order))
    out.add_scaled(psi(none, node.x, node.n), node.weight);
  out *= classical_crofton_constant(d, j, k);
  return exact(std::move(out));
}

MinkowskiRoute parse_minkowski_route(const std::string& name) {
  if (name == "auto" || name.empty()) return MinkowskiRoute::automatic;
  if (name == "general") return MinkowskiRoute::general;
  if (name == "r0") return MinkowskiRoute::r0;
  if (name == "kj1") return MinkowskiRoute::kj1;
  throw DomainError("unknown Minkowski route '" + name + "' (auto|general|r0|kj1)");
}

RhsValue aff_rhs_minkowski(const ConvexBody& body, int j, int k, int r, int s,
                           MinkowskiRoute route, const RhsConfig& cfg) {
  const int d = body.dim();
  require_range(d, j, k);
  if (r + s > kMaxRank) throw DomainError("tensor rank exceeds the cap of 8");
  if (route == MinkowskiRoute::automatic) {
    if (body.is_smooth() || s < 2) route = MinkowskiRoute::general;
    else if (k == j - 1) route = MinkowskiRoute::kj1;
    else if (r == 0) route = MinkowskiRoute::r0;
    else
      throw UnsupportedError(
          "affine Minkowski formula for polytopes needs r = 0 or k = j-1 "
          "(generalized tensors are not available for polytopes)");
  }
  const int m = d - j + k;
  SymTensor out(d, r + s);
  switch (route) {
    case MinkowskiRoute::general: {
      if (!body.is_smooth() && s >= 2)
        throw UnsupportedError("general affine Minkowski route needs generalized tensors (smooth bodies)");
      const double pref = c_affine(d, j, k) * std::pow(kPi, 0.5 * (d - 1)) /
                          (2.0 * sphere_area(j - k + s) * std::tgamma(0.5 * (d - j + 2 + k + s)));
      for (int p = 0; 2 * p <= s; ++p) {
        const double chi = chi_constant(d, j, k, s, p);
        out.add_scaled(sym_product(metric_power(d, p), phi(body, m, r, s - 2 * p, cfg.order)),
                       pref * chi * m);
        if (p > 0)
          out.add_scaled(sym_product(metric_power(d, p - 1),
                                     phi_generalized(body, m, r, s - 2 * p, cfg.order)),
                         pref * chi * 2.0 * p);
      }
      break;
    }
    case MinkowskiRoute::r0: {
      if (r != 0) throw DomainError("r0 route needs r = 0");
      const double pref = c_affine(d, j, k) * std::pow(kPi, 0.5 * (d - 1)) /
                          (2.0 * sphere_area(j - k + s) * std::tgamma(0.5 * (d - j + 2 + k + s)));
      for (int p = 0; 2 * p <= s; ++p) {
        const double coef = (m + 2 * p) * chi_constant(d, j, k, s, p) -
                            4.0 * kPi * (p + 1) * (s - 2 * p) * chi_constant(d, j, k, s, p + 1);
        out.add_scaled(sym_product(metric_power(d, p), phi(body, m, 0, s - 2 * p, cfg.order)),
                       pref * coef);
      }
      break;
    }
    case MinkowskiRoute::kj1: {
      if (k != j - 1) throw DomainError("kj1 route needs k = j-1");
      // Twice the displayed constant: only then does s = 0 reproduce the
      // classical Crofton formula and the general route for every s.
      const double pref = 2.0 * grassmann_total(d - 2, j - 1) * std::pow(kPi, 0.5 * (d + 1)) /
                          (sphere_area(s + 1) * std::tgamma(0.5 * (d + s + 1)));
      for (int p = 0; 2 * p <= s; ++p) {
        // chi / (s-2p-1) with sigma_m / m read as sigma_{m+2} / (2 pi).
        const double coef = chi_without_sigma(d - 2, j - 2, j - 1, s, p) *
                            sphere_area(s - 2 * p + 1) / (2.0 * kPi);
        out.add_scaled(sym_product(metric_power(d, p), phi(body, d - 1, r, s - 2 * p, cfg.order)),
                       pref * coef);
      }
      break;
    }
    case MinkowskiRoute::automatic:
      break;
  }
  return exact(std::move(out));
}

RhsValue aff_rhs_harmonic(const ConvexBody& body, int j, int r, int s, const RhsConfig& cfg) {
  const int d = body.dim();
  if (d < 3) throw DomainError("aff_rhs_harmonic: need d >= 3");
  if (!(1 <= j && j < d)) throw DomainError("aff_rhs_harmonic: need 1 <= j < d");
  SymTensor out = xi(body, d - 1, r, s, cfg.order);
  out *= a_constant(s, j, d) * grassmann_total(d - 2, j - 1) * sphere_area(d - 1);
  return exact(std::move(out));
}

}  // namespace crofton
