#include "oracles.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

namespace oracle {
namespace {

constexpr double kPi = std::numbers::pi;

// Kronrod 15-point nodes and weights with the embedded Gauss 7-point weights.
constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Piece {
  double value;
  double error;
};

Piece gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int i = 0; i < 7; ++i) {
    const double dx = h * kXgk[i];
    const double sum = f(c - dx) + f(c + dx);
    kronrod += kWgk[i] * sum;
    if (i % 2 == 1) gauss += kWg[i / 2] * sum;
  }
  return {kronrod * h, std::abs((kronrod - gauss) * h)};
}

double adapt(const std::function<double(double)>& f, double a, double b, Piece whole, double tol,
             int depth) {
  if (whole.error <= tol || depth > 30) return whole.value;
  const double m = 0.5 * (a + b);
  const Piece left = gk15(f, a, m);
  const Piece right = gk15(f, m, b);
  if (std::abs(left.value + right.value - whole.value) < 1e-3 * tol &&
      left.error + right.error <= tol)
    return left.value + right.value;
  return adapt(f, a, m, left, 0.5 * tol, depth + 1) + adapt(f, m, b, right, 0.5 * tol, depth + 1);
}

double multinomial(const std::vector<int>& parts) {
  int total = 0;
  double denom = 1.0;
  for (int p : parts) {
    total += p;
    denom *= factorial(p);
  }
  return factorial(total) / denom;
}

/// Adds w * x^p ⊙ y^q ⊙ ... through explicit symmetric powers.
SymTensor power(const Vector& v, int p) { return crofton::vector_power(v, p); }

SymTensor tensor_power(const SymTensor& t, int p) {
  SymTensor out = SymTensor::scalar(1.0, t.dim());
  for (int i = 0; i < p; ++i) out = crofton::sym_product(out, t);
  return out;
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol,
                 double abs_tol) {
  const Piece coarse = gk15(f, a, b);
  const double tol = std::max(abs_tol, rel_tol * std::abs(coarse.value));
  return adapt(f, a, b, coarse, tol, 0);
}

Rule legendre_rule(int n) {
  Rule r{std::vector<double>(n), std::vector<double>(n)};
  for (int i = 0; i < n; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    r.x[i] = x;
    r.w[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  return factorial(n) / (factorial(k) * factorial(n - k));
}

double sigma(int k) {
  // sigma_1 = 2, sigma_2 = 2 pi, sigma_{k+2} = 2 pi sigma_k / k.
  double s = k % 2 ? 2.0 : 2.0 * kPi;
  for (int i = k % 2 ? 1 : 2; i < k; i += 2) s *= 2.0 * kPi / i;
  return s;
}

double grassmann_mass(int d, int j) {
  if (j == 0 || j == d) return 1.0;
  return grassmann_mass(d - 1, j - 1) * sigma(d) / sigma(j);
}

double f_integral(int d, int j, int s, int l, int b, double m) {
  const double ps = j - 2 + 2 * b + 2 * l;
  const double pc = d - j - 1 + 2 * l;
  const double pm = 0.5 * (1 - s);
  return integrate(
      [&](double th) {
        const double sn = std::sin(th);
        return std::pow(sn, ps) * std::pow(1.0 - m + m * sn * sn, pm) * std::pow(std::cos(th), pc);
      },
      0.0, 0.5 * kPi, 1e-14, 1e-16);
}

double elliptic_k(double m) {
  return integrate([&](double th) { return 1.0 / std::sqrt(1.0 - m * std::pow(std::sin(th), 2)); },
                   0.0, 0.5 * kPi, 1e-15);
}

double elliptic_e(double m) {
  return integrate([&](double th) { return std::sqrt(1.0 - m * std::pow(std::sin(th), 2)); }, 0.0,
                   0.5 * kPi, 1e-15);
}

double f_elliptic(int l, int b, double m) {
  const double k = elliptic_k(m);
  const double e = elliptic_e(m);
  if (l == 0 && b == 0) return k;
  if (l == 0 && b == 1) return (e + (m - 1.0) * k) / m;
  if (l == 1 && b == 0) return (2.0 * (m - 1.0) * k - (m - 2.0) * e) / (3.0 * m * m);
  if (l == 0 && b == 2) return ((4.0 * m - 2.0) * e + (3.0 * m * m - 5.0 * m + 2.0) * k) / (3.0 * m * m);
  throw std::invalid_argument("f_elliptic: no elliptic form for (l, b)");
}

double legendre_pd(int s, int d, double t) {
  if (d == 2) return std::cos(s * std::acos(std::clamp(t, -1.0, 1.0)));
  const double lambda = 0.5 * (d - 2);
  auto gegenbauer = [&](double x) {
    double c0 = 1.0, c1 = 2.0 * lambda * x;
    if (s == 0) return c0;
    for (int n = 2; n <= s; ++n) {
      const double c2 = (2.0 * x * (n + lambda - 1.0) * c1 - (n + 2.0 * lambda - 2.0) * c0) / n;
      c0 = c1;
      c1 = c2;
    }
    return c1;
  };
  return gegenbauer(t) / gegenbauer(1.0);
}

double a_constant(int s, int j, int d) {
  return integrate(
      [&](double th) {
        const double t = std::sin(th);
        return std::pow(std::cos(th), d - j - 1) * std::pow(t, j) * legendre_pd(s, d, t);
      },
      0.0, 0.5 * kPi, 1e-14, 1e-16);
}

double gauss_series_at_one(double a, double b, double c) {
  long double term = 1.0L, sum = 1.0L;
  for (long n = 0; n < 20000000; ++n) {
    term *= (a + n) * (b + n) / ((c + n) * (n + 1.0L));
    sum += term;
    if (term == 0.0L || (n > 50 && std::abs(term) < 1e-22L * std::abs(sum))) break;
  }
  return static_cast<double>(sum);
}

SymTensor permutation_sym_product(const SymTensor& a, const SymTensor& b) {
  const int d = a.dim();
  const int p = a.rank();
  const int q = b.rank();
  SymTensor out(d, p + q);
  const auto& layout = out.layout();
  auto coefficient = [d](const SymTensor& t, const std::vector<int>& tuple) {
    std::vector<int> counts(d, 0);
    for (int i : tuple) ++counts[i];
    return t.at(std::span<const int>(counts));
  };
  for (std::size_t i = 0; i < layout.size; ++i) {
    const auto m = layout.multi_index(i);
    std::vector<int> tuple;
    for (int axis = 0; axis < d; ++axis)
      for (int c = 0; c < m[axis]; ++c) tuple.push_back(axis);
    std::vector<int> perm(tuple.size());
    for (std::size_t k = 0; k < perm.size(); ++k) perm[k] = static_cast<int>(k);
    double sum = 0.0;
    long count = 0;
    do {
      std::vector<int> first, second;
      for (int k = 0; k < p; ++k) first.push_back(tuple[perm[k]]);
      for (int k = p; k < p + q; ++k) second.push_back(tuple[perm[k]]);
      sum += coefficient(a, first) * coefficient(b, second);
      ++count;
    } while (std::next_permutation(perm.begin(), perm.end()));
    out[i] = sum / static_cast<double>(count);
  }
  return out;
}

KsResult ks_uniform(std::vector<double> samples) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double dmax = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    dmax = std::max(dmax, std::max((i + 1) / n - samples[i], samples[i] - i / n));
  }
  const double lambda = (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)) * dmax;
  double p = 0.0;
  for (int k = 1; k < 200; ++k) p += 2.0 * (k % 2 ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
  return {dmax, std::clamp(p, 0.0, 1.0)};
}

std::vector<SurfaceNode> sphere_nodes(const Vector& c, double radius, int n) {
  const Rule r = legendre_rule(n);
  const int nphi = 2 * n;
  std::vector<SurfaceNode> out;
  for (int a = 0; a < n; ++a) {
    const double z = r.x[a];
    const double s = std::sqrt(1.0 - z * z);
    for (int b = 0; b < nphi; ++b) {
      const double phi = 2.0 * kPi * (b + 0.5) / nphi;
      Vector u(3), ephi(3), eth(3);
      u << s * std::cos(phi), s * std::sin(phi), z;
      ephi << -std::sin(phi), std::cos(phi), 0.0;
      eth << z * std::cos(phi), z * std::sin(phi), -s;
      out.push_back({c + radius * u, u, radius * radius * r.w[a] * 2.0 * kPi / nphi,
                     {1.0 / radius, 1.0 / radius}, {eth, ephi}});
    }
  }
  return out;
}

std::vector<SurfaceNode> box_nodes(const Vector& lo, const Vector& hi, int n, int split) {
  const Rule r = legendre_rule(n);
  std::vector<SurfaceNode> out;
  for (int axis = 0; axis < 3; ++axis) {
    const int u = (axis + 1) % 3;
    const int v = (axis + 2) % 3;
    for (int side = 0; side < 2; ++side) {
      Vector normal = Vector::Zero(3);
      normal[axis] = side ? 1.0 : -1.0;
      Vector eu = Vector::Zero(3), ev = Vector::Zero(3);
      eu[u] = 1.0;
      ev[v] = 1.0;
      const double hu = (hi[u] - lo[u]) / split;
      const double hv = (hi[v] - lo[v]) / split;
      for (int cu = 0; cu < split; ++cu)
        for (int cv = 0; cv < split; ++cv)
          for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
              Vector x(3);
              x[axis] = side ? hi[axis] : lo[axis];
              x[u] = lo[u] + hu * (cu + 0.5 * (1.0 + r.x[a]));
              x[v] = lo[v] + hv * (cv + 0.5 * (1.0 + r.x[b]));
              out.push_back({x, normal, 0.25 * hu * hv * r.w[a] * r.w[b], {0.0, 0.0}, {eu, ev}});
            }
    }
  }
  return out;
}

SymTensor example_hyperplane(const std::vector<SurfaceNode>& nodes, int r) {
  SymTensor out(3, r);
  for (const SurfaceNode& nd : nodes) {
    const double rx = nd.x.norm();
    const double xn = nd.x.dot(nd.n);
    const double m = std::max(0.0, 1.0 - xn * xn / (rx * rx));
    const double root = std::sqrt(1.0 - m);
    // (1 - sqrt(1-m)) / m and (sqrt(1-m) - 1)^2 / m^2 in cancellation-free form.
    const double g = 1.0 / (1.0 + root);
    const double h = g * g;
    double sum = 0.0;
    for (int i = 0; i < 2; ++i) {
      const double xa = nd.x.dot(nd.dirs[1 - i]);
      sum += nd.kappa[i] * (g - h * xa * xa / (rx * rx));
    }
    out.add_scaled(power(nd.x, r), nd.w * sum / (2.0 * factorial(r) * rx));
  }
  return out;
}

SymTensor example_plane_s1(const std::vector<SurfaceNode>& nodes, int r) {
  SymTensor out(3, r + 1);
  for (const SurfaceNode& nd : nodes) {
    const double rx = nd.x.norm();
    const double xn = nd.x.dot(nd.n);
    const double lam = 0.5 * nd.w;  // Lambda_2 is half the surface measure
    out.add_scaled(power(nd.x, r + 1), lam * xn / (2.0 * factorial(r) * rx * rx * rx));
    out.add_scaled(crofton::sym_product(power(nd.n, 1), power(nd.x, r)),
                   lam / (2.0 * factorial(r) * rx));
  }
  return out;
}

SymTensor example_plane_s2(const std::vector<SurfaceNode>& nodes, int r) {
  const SymTensor q = crofton::metric_tensor(3);
  SymTensor out(3, r + 2);
  for (const SurfaceNode& nd : nodes) {
    const double rx = nd.x.norm();
    const double xn = nd.x.dot(nd.n);
    const double m = std::max(0.0, 1.0 - xn * xn / (rx * rx));
    auto f = [&](int l, int b) {
      return m < 0.02 ? oracle::f_integral(3, 2, 2, l, b, m) : f_elliptic(l, b, m);
    };
    const double pref = 2.0 / (sigma(3) * factorial(r)) * 0.5 * nd.w;
    for (int a = 0; a <= 2; ++a)
      for (int b = 0; a + b <= 2; ++b) {
        const int c = 2 - a - b;
        const double coef = multinomial({a, b, c}) * (b % 2 ? -1.0 : 1.0) *
                            std::pow(xn, a + b) / std::pow(rx, 1 + 2 * a + 2 * b) * f(0, b + c);
        out.add_scaled(crofton::sym_product(power(nd.n, c), power(nd.x, r + a + b)), pref * coef);
      }
    const double f10 = f(1, 0);
    // (p, q, t, v) with p + q + t + v = 1.
    out.add_scaled(crofton::sym_product(q, power(nd.x, r)), pref * m / rx * f10);
    out.add_scaled(crofton::sym_product(power(nd.n, 2), power(nd.x, r)), -pref / rx * f10);
    out.add_scaled(crofton::sym_product(power(nd.n, 1), power(nd.x, r + 1)),
                   pref * 2.0 * xn / std::pow(rx, 3) * f10);
    out.add_scaled(power(nd.x, r + 2), -pref / std::pow(rx, 3) * f10);
  }
  return out;
}

SymTensor factored_surface(const std::vector<SurfaceNode>& nodes, int d, int j, int r, int s) {
  const double pref = sigma(1) / (factorial(r) * factorial(s) * sigma(s + 1));
  const double cmass = grassmann_mass(d - 3, j - 2);
  SymTensor out(d, r + s);
  for (const SurfaceNode& nd : nodes) {
    const double rx = nd.x.norm();
    const Vector nx = nd.n.dot(nd.x) / (rx * rx) * nd.x;
    const Vector nperp = nd.n - nx;
    const double alpha = nperp.norm();
    const double m = alpha * alpha;
    // Q(x⊥ ∩ n⊥): the orthogonal complement of span{x, n}.
    SymTensor qperp(d, 2);
    if (alpha > 1e-12) {
      Matrix span(d, 2);
      span.col(0) = nd.x;
      span.col(1) = nd.n;
      Eigen::HouseholderQR<Matrix> qr(span);
      const Matrix full = qr.householderQ();
      qperp = crofton::metric_tensor(Matrix(full.rightCols(d - 2)));
    }
    std::map<std::pair<int, int>, double> fcache;
    SymTensor inner(d, s);
    for (int l = 0; 2 * l <= s; ++l)
      for (int b = 0; b + 2 * l <= s; ++b) {
        const int a = s - b - 2 * l;
        if (alpha <= 1e-12 && (l > 0 || b > 0)) continue;
        auto key = std::make_pair(l, b);
        if (!fcache.count(key)) fcache[key] = oracle::f_integral(d, j, s, l, b, m);
        const double coef = cmass * 2.0 * sigma(2 * l + d - 2) / sigma(2 * l + 1) *
                            multinomial({a, b, 2 * l}) * std::pow(m, l) * fcache[key];
        SymTensor term = crofton::sym_product(power(nx, a), power(nperp, b));
        term = crofton::sym_product(term, tensor_power(qperp, l));
        inner.add_scaled(term, coef);
      }
    out.add_scaled(crofton::sym_product(power(nd.x, r), inner),
                   pref * 0.5 * nd.w / std::pow(rx, d - j));
  }
  return out;
}

SymTensor lines_interior(const std::vector<SurfaceNode>& nodes, int d, int r, int s) {
  SymTensor out(d, r + s);
  const double pref = 1.0 / (factorial(r) * factorial(s) * sigma(s + 1));
  for (const SurfaceNode& nd : nodes) {
    const double rx = nd.x.norm();
    out.add_scaled(power(nd.x, r + s), pref * nd.w * nd.x.dot(nd.n) / std::pow(rx, d + s));
  }
  return out;
}

}  // namespace oracle
