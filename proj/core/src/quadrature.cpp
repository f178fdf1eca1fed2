#include "crofton/quadrature.hpp"

#include "crofton/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace crofton {
namespace {

template <typename Key, typename Value, typename Make>
const Value& cached(std::map<Key, std::unique_ptr<Value>>& cache,
                    std::mutex& mutex, const Key& key, Make&& make) {
  std::lock_guard lock(mutex);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, std::make_unique<Value>(make())).first;
  return *it->second;
}

}  // namespace

QuadratureRule gauss_jacobi(int n, double alpha, double beta) {
  if (n < 1) throw DomainError("gauss_jacobi: need at least one node");
  if (alpha <= -1.0 || beta <= -1.0)
    throw DomainError("gauss_jacobi: exponents must exceed -1");

  // Golub-Welsch on the Jacobi matrix of the monic recurrence.
  const double ab = alpha + beta;
  Vector diag(n);
  Vector sub(std::max(n - 1, 1));
  for (int k = 0; k < n; ++k) {
    if (k == 0) {
      diag[0] = (beta - alpha) / (ab + 2.0);
    } else {
      const double t = 2.0 * k + ab;
      diag[k] = (beta * beta - alpha * alpha) / (t * (t + 2.0));
    }
  }
  for (int k = 1; k < n; ++k) {
    double b2;
    if (k == 1) {
      b2 = 4.0 * (1.0 + alpha) * (1.0 + beta) /
           ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
    } else {
      const double t = 2.0 * k + ab;
      b2 = 4.0 * k * (k + alpha) * (k + beta) * (k + ab) /
           (t * t * (t + 1.0) * (t - 1.0));
    }
    sub[k - 1] = std::sqrt(b2);
  }
  const double mu0 = std::exp((ab + 1.0) * std::log(2.0) +
                              std::lgamma(alpha + 1.0) +
                              std::lgamma(beta + 1.0) - std::lgamma(ab + 2.0));

  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  if (n == 1) {
    rule.nodes[0] = diag[0];
    rule.weights[0] = mu0;
    return rule;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver;
  solver.computeFromTridiagonal(diag, sub.head(n - 1), Eigen::ComputeEigenvectors);
  for (int k = 0; k < n; ++k) {
    rule.nodes[k] = solver.eigenvalues()[k];
    const double v0 = solver.eigenvectors()(0, k);
    rule.weights[k] = mu0 * v0 * v0;
  }
  return rule;
}

const QuadratureRule& gauss_legendre(int n) {
  static std::map<int, std::unique_ptr<QuadratureRule>> cache;
  static std::mutex mutex;
  return cached(cache, mutex, n, [n] { return gauss_jacobi(n, 0.0, 0.0); });
}

QuadratureRule gauss_legendre(int n, double a, double b) {
  QuadratureRule rule = gauss_legendre(n);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (b + a);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    rule.nodes[i] = mid + half * rule.nodes[i];
    rule.weights[i] *= half;
  }
  return rule;
}

namespace {

SphereRule build_sphere_rule(int dim, int order) {
  SphereRule rule;
  if (dim == 1) {
    rule.points.resize(1, 2);
    rule.points << -1.0, 1.0;
    rule.weights = {1.0, 1.0};
    return rule;
  }
  if (dim == 2) {
    rule.points.resize(2, order);
    rule.weights.assign(order, 2.0 * std::numbers::pi / order);
    for (int k = 0; k < order; ++k) {
      // Half-step offset keeps nodes off the coordinate axes.
      const double phi = 2.0 * std::numbers::pi * (k + 0.5) / order;
      rule.points(0, k) = std::cos(phi);
      rule.points(1, k) = std::sin(phi);
    }
    return rule;
  }
  const SphereRule& inner = sphere_rule(dim - 1, order);
  const double e = 0.5 * (dim - 3);
  const QuadratureRule t_rule = gauss_jacobi(order, e, e);
  const auto n_inner = static_cast<int>(inner.weights.size());
  const int total = order * n_inner;
  rule.points.resize(dim, total);
  rule.weights.resize(total);
  int col = 0;
  for (int a = 0; a < order; ++a) {
    const double t = t_rule.nodes[a];
    const double r = std::sqrt(std::max(0.0, 1.0 - t * t));
    for (int b = 0; b < n_inner; ++b, ++col) {
      rule.points.col(col).head(dim - 1) = r * inner.points.col(b);
      rule.points(dim - 1, col) = t;
      rule.weights[col] = t_rule.weights[a] * inner.weights[b];
    }
  }
  return rule;
}

}  // namespace

const SphereRule& sphere_rule(int dim, int order) {
  if (dim < 1) throw DomainError("sphere_rule: dimension must be >= 1");
  if (order < 1) throw DomainError("sphere_rule: order must be >= 1");
  static std::map<std::pair<int, int>, std::unique_ptr<SphereRule>> cache;
  static std::recursive_mutex mutex;
  std::lock_guard lock(mutex);
  auto key = std::make_pair(dim, order);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache
             .emplace(key, std::make_unique<SphereRule>(
                               build_sphere_rule(dim, order)))
             .first;
  return *it->second;
}

const TriangleRule& triangle_rule(int n) {
  static std::map<int, std::unique_ptr<TriangleRule>> cache;
  static std::mutex mutex;
  return cached(cache, mutex, n, [n] {
    const QuadratureRule g = gauss_legendre(n, 0.0, 1.0);
    TriangleRule rule;
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        const double xi = g.nodes[a];
        const double eta = g.nodes[b];
        rule.u.push_back(xi);
        rule.v.push_back((1.0 - xi) * eta);
        rule.weights.push_back(g.weights[a] * g.weights[b] * (1.0 - xi));
      }
    }
    return rule;
  });
}

}  // namespace crofton
