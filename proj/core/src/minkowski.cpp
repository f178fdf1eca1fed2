#include "crofton/minkowski.hpp"

#include "crofton/errors.hpp"
#include "crofton/specfun.hpp"

#include <cmath>
#include <numbers>

namespace crofton {
namespace {

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

void check_ranks(int r, int s) {
  if (r < 0 || s < 0) throw DomainError("tensor ranks must be non-negative");
  if (r + s > kMaxRank) throw DomainError("tensor rank exceeds the cap of 8");
}

/// Exact Gauss order for degree-r polynomials on segments and triangles.
int face_order(int r) { return r / 2 + 2; }

int cone_order(int order) { return std::clamp(order, 8, 24); }

struct PushForward {
  const AffineFlat* flat;
  Vector point(const Vector& u) const { return flat ? flat->to_ambient(u) : u; }
  Vector direction(const Vector& u) const { return flat ? Vector(flat->base().frame() * u) : u; }
  int dim(int intrinsic) const { return flat ? flat->dim() : intrinsic; }
};

SymTensor polytope_moment(const Polytope& p, int k, int r, int s, const PushForward& push,
                          int order) {
  const int d = push.dim(p.dim());
  SymTensor out(d, r + s);
  if (k == p.dim()) {
    // ∫_X x^r dx = 1/(m + r) ∑_F b_F ∫_F x^r, by homogeneity.
    const auto facets = p.faces_of_dim(p.dim() - 1);
    for (std::size_t i = 0; i < facets.size(); ++i) {
      const PointRule rule = face_rule(p, *facets[i], face_order(r));
      const double b = p.halfspaces()[i].offset;
      for (std::size_t q = 0; q < rule.weights.size(); ++q)
        accumulate_power_product(out, push.point(rule.points[q]), r, Vector::Zero(d), 0,
                                 rule.weights[q] * b);
    }
    out *= 1.0 / (p.dim() + r);
    return out;
  }
  for (const FaceData* face : p.faces_of_dim(k)) {
    SymTensor xs(d, r);
    const PointRule fr = face_rule(p, *face, face_order(r));
    for (std::size_t q = 0; q < fr.weights.size(); ++q)
      accumulate_power_product(xs, push.point(fr.points[q]), r, Vector::Zero(d), 0,
                               fr.weights[q]);
    SymTensor ns(d, s);
    const PointRule cr = cone_rule(*face, cone_order(order));
    for (std::size_t q = 0; q < cr.weights.size(); ++q)
      accumulate_power_product(ns, Vector::Zero(d), 0, push.direction(cr.points[q]), s,
                               cr.weights[q]);
    out += sym_product(xs, ns);
  }
  return out;
}

SymTensor smooth_moment(const ConvexBody& body, int k, int r, int s, const PushForward& push,
                        int order) {
  const int m = body.dim();
  const int d = push.dim(m);
  SymTensor out(d, r + s);
  const auto samples = boundary_cubature(body, order);
  if (k == m) {
    if (push.flat) throw UnsupportedError("volume moments are computed without an embedding");
    for (const auto& smp : samples)
      accumulate_power_product(out, smp.x, r, smp.n, 0, smp.weight * smp.x.dot(smp.n));
    out *= 1.0 / (m + r);
    return out;
  }
  for (const auto& smp : samples) {
    const double w = smp.weight * elementary_symmetric(smp.kappas, m - 1 - k);
    accumulate_power_product(out, push.point(smp.x), r, push.direction(smp.n), s, w);
  }
  return out;
}

SymTensor moment(const ConvexBody& body, int k, int r, int s, const AffineFlat* flat,
                 int order) {
  check_ranks(r, s);
  const int m = body.dim();
  if (k < 0 || k > m) throw DomainError("curvature measure index out of range");
  if (k == m && s != 0) throw DomainError("volume tensors require s = 0");
  if (flat && flat->subdim() != m) throw DomainError("embedding dimension mismatch");
  const PushForward push{flat};
  if (const Polytope* p = body.polytope()) {
    if (k == m && flat) throw UnsupportedError("volume moments are computed without an embedding");
    return polytope_moment(*p, k, r, s, push, order);
  }
  return smooth_moment(body, k, r, s, push, order);
}

/// ∑_i coef_i Q^i ⊙ M^{r, s-2i} for the normalized H^s_d combination.
SymTensor harmonic_moment(const ConvexBody& body, int k, int r, int s, int d,
                          const AffineFlat* flat, int order) {
  const auto coef = harmonic_coefficients(d, s);
  SymTensor out(d, r + s);
  for (std::size_t i = 0; i < coef.size(); ++i) {
    const int p = static_cast<int>(i);
    out += coef[i] * sym_product(metric_power(d, p), moment(body, k, r, s - 2 * p, flat, order));
  }
  return out;
}

}  // namespace

double elementary_symmetric(const Vector& v, int m) {
  if (m < 0 || m > v.size()) return 0.0;
  std::vector<double> e(static_cast<std::size_t>(m) + 1, 0.0);
  e[0] = 1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    for (int q = std::min<int>(m, static_cast<int>(i) + 1); q >= 1; --q) e[q] += v[i] * e[q - 1];
  return e[m];
}

std::vector<CurvatureNode> curvature_nodes(const ConvexBody& body, int k,
                                           const AffineFlat* embedding, int order) {
  const int m = body.dim();
  if (k < 0 || k >= m) throw DomainError("curvature_nodes: need 0 <= k < dim");
  if (embedding && embedding->subdim() != m) throw DomainError("embedding dimension mismatch");
  const PushForward push{embedding};
  const double scale = 1.0 / sphere_area(m - k);
  std::vector<CurvatureNode> out;
  if (const Polytope* p = body.polytope()) {
    for (const FaceData* face : p->faces_of_dim(k)) {
      const PointRule fr = face_rule(*p, *face, face_order(order / 8));
      const PointRule cr = cone_rule(*face, cone_order(order));
      for (std::size_t a = 0; a < fr.weights.size(); ++a)
        for (std::size_t b = 0; b < cr.weights.size(); ++b)
          out.push_back({push.point(fr.points[a]), push.direction(cr.points[b]),
                         scale * fr.weights[a] * cr.weights[b]});
    }
    return out;
  }
  for (const auto& smp : boundary_cubature(body, order)) {
    const double w = smp.weight * elementary_symmetric(smp.kappas, m - 1 - k);
    if (w != 0.0) out.push_back({push.point(smp.x), push.direction(smp.n), scale * w});
  }
  return out;
}

SymTensor curvature_moment(const ConvexBody& body, int k, int r, int s,
                           const AffineFlat* embedding, int order) {
  return moment(body, k, r, s, embedding, order);
}

SymTensor phi(const ConvexBody& body, int k, int r, int s, int order) {
  const int d = body.dim();
  SymTensor m = moment(body, k, r, s, nullptr, order);
  if (k == d) return m;
  m *= 1.0 / (factorial(r) * factorial(s) * sphere_area(d - k + s));
  return m;
}

SymTensor phi_relative(const ConvexBody& section, int k, int r, int s, const AffineFlat& flat,
                       int order) {
  const int j = section.dim();
  if (k >= j) throw DomainError("phi_relative: need k < dim E");
  SymTensor m = moment(section, k, r, s, &flat, order);
  m *= 1.0 / (factorial(r) * factorial(s) * sphere_area(j - k + s));
  return m;
}

TensorEstimate phi_with_error(const ConvexBody& body, int k, int r, int s, int order) {
  TensorEstimate est{phi(body, k, r, s, order), 0.0};
  const SymTensor coarse = phi(body, k, r, s, std::max(2, order / 2));
  est.error = (est.value - coarse).max_abs();
  return est;
}

SymTensor phi_generalized(const ConvexBody& body, int k, int r, int s, int order) {
  check_ranks(r, s + 2);
  const int d = body.dim();
  if (!body.is_smooth())
    throw UnsupportedError("generalized tensors are implemented for smooth bodies only");
  if (k < 1 || k > d - 1) throw DomainError("phi_generalized: need 1 <= k <= d-1");
  SymTensor out(d, r + s + 2);
  const int m = d - 1 - k;
  for (const auto& smp : boundary_cubature(body, order)) {
    SymTensor g(d, 2);
    for (int i = 0; i < d - 1; ++i) {
      Vector others(d - 2);
      for (int q = 0, c = 0; q < d - 1; ++q)
        if (q != i) others[c++] = smp.kappas[q];
      const double e = elementary_symmetric(others, m);
      if (e != 0.0) accumulate_power_product(g, smp.dirs.col(i), 2, smp.n, 0, e);
    }
    SymTensor ns(d, s);
    accumulate_power_product(ns, smp.x, 0, smp.n, s, 1.0);
    accumulate_power_times(out, smp.x, r, sym_product(ns, g), smp.weight);
  }
  out *= 1.0 / (factorial(r) * factorial(s) * sphere_area(d - k + s));
  return out;
}

std::vector<double> harmonic_coefficients(int d, int s) {
  if (d < 2 || s < 0) throw DomainError("harmonic_basis: need d >= 2, s >= 0");
  if (d == 2 && s == 0) throw DomainError("harmonic_basis: H^0_2 involves Gamma(0)");
  std::vector<double> coef;
  for (int i = 0; 2 * i <= s; ++i) {
    const double g = std::tgamma(0.5 * d + s - 1 - i);
    const double sign = i % 2 ? -1.0 : 1.0;
    coef.push_back(sign * g / (std::pow(4.0, i) * factorial(i) * factorial(s - 2 * i)));
  }
  return coef;
}

SymTensor harmonic_basis(int d, int s, const Vector& u) {
  if (u.size() != d) throw DomainError("harmonic_basis: dimension mismatch");
  const auto coef = harmonic_coefficients(d, s);
  SymTensor out(d, s);
  const double u2 = u.squaredNorm();
  for (std::size_t i = 0; i < coef.size(); ++i) {
    const int p = static_cast<int>(i);
    out += coef[i] * std::pow(u2, p) * sym_product(metric_power(d, p), vector_power(u, s - 2 * p));
  }
  return out;
}

SymTensor xi(const ConvexBody& body, int k, int r, int s, int order) {
  const int d = body.dim();
  if (k < 0 || k > d - 1) throw DomainError("xi: need 0 <= k <= d-1");
  SymTensor out = harmonic_moment(body, k, r, s, d, nullptr, order);
  out *= 1.0 / (factorial(r) * factorial(s) * sphere_area(d - k + s));
  return out;
}

SymTensor xi_tilde_relative(const ConvexBody& section, int r, int s, const AffineFlat& flat,
                            int order) {
  const int j = section.dim();
  SymTensor out = harmonic_moment(section, j - 1, r, s, flat.dim(), &flat, order);
  out *= 1.0 / (factorial(r) * factorial(s) * sphere_area(s + 1));
  return out;
}

std::vector<IdentityResidual> check_prop21(const ConvexBody& body, int k, int r, int s,
                                           int order) {
  const int d = body.dim();
  if (s < 2) throw DomainError("check_prop21: need s >= 2");
  if (k < 1 || k > d - 1) throw DomainError("check_prop21: need 1 <= k <= d-1");
  const double two_pi = 2.0 * std::numbers::pi;
  const SymTensor q = metric_tensor(d);
  auto ph = [&](int i, int rr, int ss) {
    if (i < 0 || i > d - 1) return SymTensor(d, rr + ss);
    return phi(body, i, rr, ss, order);
  };
  const SymTensor lhs = phi_generalized(body, k, r, s - 2, order);
  std::vector<IdentityResidual> out;
  if (k == d - 1) {
    const SymTensor rhs = sym_product(q, ph(d - 1, r, s - 2)) - two_pi * s * ph(d - 1, r, s);
    out.push_back({"trivial", lhs, lhs - rhs});
    return out;
  }
  SymTensor rhs11(d, r + s);
  for (int l = 0; l <= s - 1; ++l) rhs11.add_scaled(ph(k - l - 1, r + l + 1, s - l - 1), two_pi * (s - 1 - l));
  for (int l = 0; l <= s - 3; ++l) rhs11 -= sym_product(q, ph(k - l - 1, r + l + 1, s - l - 3));
  out.push_back({"linkomb", lhs, lhs - rhs11});

  SymTensor rhs12(d, r + s);
  for (int l = 0; l <= r; ++l) {
    rhs12 += sym_product(q, ph(k + l, r - l, s - 2 + l));
    rhs12.add_scaled(ph(k + l, r - l, s + l), -two_pi * (s + l));
  }
  out.push_back({"linkomb2", lhs, lhs - rhs12});

  if (r == 0) {
    const SymTensor rhs13 = sym_product(q, ph(k, 0, s - 2)) - two_pi * s * ph(k, 0, s);
    out.push_back({"r0", lhs, lhs - rhs13});
  }
  return out;
}

}  // namespace crofton
