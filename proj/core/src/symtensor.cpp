#include "crofton/symtensor.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <mutex>
#include <sstream>
#include <stdexcept>

namespace crofton {
namespace {

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Number of multi-indices of length n summing to s.
std::size_t count_indices(int n, int s) {
  if (n == 0) return s == 0 ? 1 : 0;
  // binomial(s + n - 1, n - 1)
  double c = 1.0;
  for (int i = 1; i <= n - 1; ++i) c = c * (s + i) / i;
  return static_cast<std::size_t>(std::llround(c));
}

void check_dim_rank(int dim, int rank) {
  if (dim < 1 || dim > kMaxDim)
    throw std::invalid_argument("SymTensor: dimension out of range");
  if (rank < 0 || rank > kMaxRank)
    throw std::invalid_argument("SymTensor: rank must be in [0, 8]");
}

std::unique_ptr<TensorLayout> build_layout(int dim, int rank) {
  auto layout = std::make_unique<TensorLayout>();
  layout->dim = dim;
  layout->rank = rank;
  layout->size = count_indices(dim, rank);
  layout->exponents.reserve(layout->size * dim);
  layout->multinomial.reserve(layout->size);

  std::vector<int> m(dim, 0);
  // Descending lexicographic enumeration by recursion on the leading slot.
  auto emit = [&](auto&& self, int pos, int remaining) -> void {
    if (pos == dim - 1) {
      m[pos] = remaining;
      layout->exponents.insert(layout->exponents.end(), m.begin(), m.end());
      double w = factorial(rank);
      for (int e : m) w /= factorial(e);
      layout->multinomial.push_back(w);
      return;
    }
    for (int v = remaining; v >= 0; --v) {
      m[pos] = v;
      self(self, pos + 1, remaining - v);
    }
  };
  emit(emit, 0, rank);
  return layout;
}

struct ProductEntry {
  std::uint32_t a;
  std::uint32_t b;
  std::uint32_t out;
  double weight;
};

struct ProductPlan {
  std::vector<ProductEntry> entries;
};

std::unique_ptr<ProductPlan> build_product_plan(int dim, int p, int q) {
  const auto& la = tensor_layout(dim, p);
  const auto& lb = tensor_layout(dim, q);
  const auto& lo = tensor_layout(dim, p + q);
  auto plan = std::make_unique<ProductPlan>();
  plan->entries.reserve(la.size * lb.size);
  std::vector<int> m(dim);
  for (std::size_t ia = 0; ia < la.size; ++ia) {
    auto ma = la.multi_index(ia);
    for (std::size_t ib = 0; ib < lb.size; ++ib) {
      auto mb = lb.multi_index(ib);
      for (int k = 0; k < dim; ++k) m[k] = ma[k] + mb[k];
      std::size_t io = lo.index_of(m);
      double w = la.multinomial[ia] * lb.multinomial[ib] / lo.multinomial[io];
      plan->entries.push_back({static_cast<std::uint32_t>(ia),
                               static_cast<std::uint32_t>(ib),
                               static_cast<std::uint32_t>(io), w});
    }
  }
  return plan;
}

const ProductPlan& product_plan(int dim, int p, int q) {
  static std::array<std::array<std::array<std::once_flag, kMaxRank + 1>,
                               kMaxRank + 1>,
                    kMaxDim + 1>
      flags;
  static std::array<std::array<std::array<std::unique_ptr<ProductPlan>,
                                          kMaxRank + 1>,
                               kMaxRank + 1>,
                    kMaxDim + 1>
      plans;
  check_dim_rank(dim, p + q);
  std::call_once(flags[dim][p][q],
                 [&] { plans[dim][p][q] = build_product_plan(dim, p, q); });
  return *plans[dim][p][q];
}

// Fills out[i] = x^{m_i} for every multi-index of the given rank.
void monomials(const Vector& x, int rank, std::vector<double>& out) {
  const int dim = static_cast<int>(x.size());
  const auto& layout = tensor_layout(dim, rank);
  thread_local std::vector<double> powers;
  powers.assign(static_cast<std::size_t>(dim) * (rank + 1), 1.0);
  for (int i = 0; i < dim; ++i)
    for (int e = 1; e <= rank; ++e)
      powers[i * (rank + 1) + e] = powers[i * (rank + 1) + e - 1] * x[i];
  out.resize(layout.size);
  for (std::size_t k = 0; k < layout.size; ++k) {
    auto m = layout.multi_index(k);
    double v = 1.0;
    for (int i = 0; i < dim; ++i) v *= powers[i * (rank + 1) + m[i]];
    out[k] = v;
  }
}

}  // namespace

std::size_t TensorLayout::index_of(std::span<const int> m) const {
  std::size_t index = 0;
  int remaining = rank;
  for (int pos = 0; pos < dim - 1; ++pos) {
    for (int v = remaining; v > m[pos]; --v)
      index += count_indices(dim - pos - 1, remaining - v);
    remaining -= m[pos];
  }
  return index;
}

const TensorLayout& tensor_layout(int dim, int rank) {
  static std::array<std::array<std::once_flag, kMaxRank + 1>, kMaxDim + 1>
      flags;
  static std::array<std::array<std::unique_ptr<TensorLayout>, kMaxRank + 1>,
                    kMaxDim + 1>
      layouts;
  check_dim_rank(dim, rank);
  std::call_once(flags[dim][rank],
                 [&] { layouts[dim][rank] = build_layout(dim, rank); });
  return *layouts[dim][rank];
}

SymTensor::SymTensor(int dim, int rank) : dim_(dim), rank_(rank) {
  coeffs_.assign(tensor_layout(dim, rank).size, 0.0);
}

SymTensor SymTensor::scalar(double value, int dim) {
  SymTensor t(dim, 0);
  t.coeffs_[0] = value;
  return t;
}

SymTensor SymTensor::from_vector(const Vector& v) {
  SymTensor t(static_cast<int>(v.size()), 1);
  for (int i = 0; i < v.size(); ++i) t.coeffs_[i] = v[i];
  return t;
}

double SymTensor::at(std::span<const int> multi_index) const {
  return coeffs_[layout().index_of(multi_index)];
}

double& SymTensor::at(std::span<const int> multi_index) {
  return coeffs_[layout().index_of(multi_index)];
}

double SymTensor::value() const {
  if (rank_ != 0) throw std::logic_error("SymTensor::value on non-scalar");
  return coeffs_[0];
}

Vector SymTensor::to_vector() const {
  if (rank_ != 1) throw std::logic_error("SymTensor::to_vector needs rank 1");
  return Eigen::Map<const Vector>(coeffs_.data(), dim_);
}

double SymTensor::evaluate(std::span<const Vector> args) const {
  if (static_cast<int>(args.size()) != rank_)
    throw std::invalid_argument("SymTensor::evaluate: argument count != rank");
  SymTensor t = *this;
  for (const auto& v : args) t = contract(t, from_vector(v));
  return t.value();
}

double SymTensor::evaluate_power(const Vector& u) const {
  const auto& l = layout();
  std::vector<double> mono;
  monomials(u, rank_, mono);
  double v = 0.0;
  for (std::size_t i = 0; i < l.size; ++i)
    v += l.multinomial[i] * coeffs_[i] * mono[i];
  return v;
}

double SymTensor::max_abs() const {
  double m = 0.0;
  for (double c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

void SymTensor::check_compatible(const SymTensor& other,
                                 const char* what) const {
  if (dim_ != other.dim_ || rank_ != other.rank_)
    throw std::invalid_argument(std::string(what) +
                                ": dimension or rank mismatch");
}

SymTensor& SymTensor::operator+=(const SymTensor& other) {
  return add_scaled(other, 1.0);
}

SymTensor& SymTensor::operator-=(const SymTensor& other) {
  return add_scaled(other, -1.0);
}

SymTensor& SymTensor::operator*=(double factor) {
  for (double& c : coeffs_) c *= factor;
  return *this;
}

SymTensor& SymTensor::add_scaled(const SymTensor& other, double factor) {
  check_compatible(other, "SymTensor addition");
  for (std::size_t i = 0; i < coeffs_.size(); ++i)
    coeffs_[i] += factor * other.coeffs_[i];
  return *this;
}

std::string SymTensor::to_json() const {
  nlohmann::ordered_json coeffs = nlohmann::ordered_json::object();
  const auto& l = layout();
  for (std::size_t i = 0; i < l.size; ++i) {
    if (coeffs_[i] == 0.0) continue;
    std::string key;
    auto m = l.multi_index(i);
    for (int k = 0; k < dim_; ++k) {
      if (k) key += ',';
      key += std::to_string(m[k]);
    }
    coeffs[key] = coeffs_[i];
  }
  nlohmann::ordered_json j;
  j["dim"] = dim_;
  j["rank"] = rank_;
  j["coeffs"] = std::move(coeffs);
  return j.dump();
}

SymTensor SymTensor::from_json(std::string_view text) {
  auto j = nlohmann::json::parse(text);
  SymTensor t(j.at("dim").get<int>(), j.at("rank").get<int>());
  for (auto& [key, value] : j.at("coeffs").items()) {
    std::vector<int> m;
    std::stringstream ss(key);
    std::string part;
    while (std::getline(ss, part, ',')) m.push_back(std::stoi(part));
    int sum = 0;
    for (int e : m) sum += e;
    if (static_cast<int>(m.size()) != t.dim_ || sum != t.rank_)
      throw std::invalid_argument("SymTensor::from_json: bad multi-index '" +
                                  key + "'");
    t.at(m) = value.get<double>();
  }
  return t;
}

SymTensor operator+(SymTensor a, const SymTensor& b) { return a += b; }
SymTensor operator-(SymTensor a, const SymTensor& b) { return a -= b; }
SymTensor operator*(double factor, SymTensor a) { return a *= factor; }
SymTensor operator*(SymTensor a, double factor) { return a *= factor; }

SymTensor sym_product(const SymTensor& a, const SymTensor& b) {
  if (a.dim() != b.dim())
    throw std::invalid_argument("sym_product: dimension mismatch");
  SymTensor out(a.dim(), a.rank() + b.rank());
  const auto& plan = product_plan(a.dim(), a.rank(), b.rank());
  auto ca = a.coeffs();
  auto cb = b.coeffs();
  auto co = out.coeffs();
  for (const auto& e : plan.entries) co[e.out] += e.weight * ca[e.a] * cb[e.b];
  return out;
}

SymTensor vector_power(const Vector& v, int p) {
  if (p < 0) throw std::invalid_argument("vector_power: negative power");
  SymTensor out(static_cast<int>(v.size()), p);
  std::vector<double> mono;
  monomials(v, p, mono);
  std::copy(mono.begin(), mono.end(), out.coeffs().begin());
  return out;
}

SymTensor metric_tensor(const Matrix& frame) {
  const int dim = static_cast<int>(frame.rows());
  if (frame.cols() > 0) {
    Matrix gram = frame.transpose() * frame;
    gram -= Matrix::Identity(frame.cols(), frame.cols());
    if (gram.cwiseAbs().maxCoeff() > 1e-10)
      throw std::invalid_argument("metric_tensor: frame is not orthonormal");
  }
  SymTensor q(dim, 2);
  for (int c = 0; c < frame.cols(); ++c) q += vector_power(frame.col(c), 2);
  return q;
}

SymTensor metric_tensor(int dim) {
  SymTensor q(dim, 2);
  std::vector<int> m(dim, 0);
  for (int i = 0; i < dim; ++i) {
    m[i] = 2;
    q.at(m) = 1.0;
    m[i] = 0;
  }
  return q;
}

SymTensor metric_power(int dim, int p) {
  SymTensor out = SymTensor::scalar(1.0, dim);
  if (p <= 0) return out;
  const SymTensor q = metric_tensor(dim);
  for (int i = 0; i < p; ++i) out = sym_product(out, q);
  return out;
}

SymTensor contract(const SymTensor& t, const SymTensor& s) {
  if (t.dim() != s.dim())
    throw std::invalid_argument("contract: dimension mismatch");
  if (s.rank() > t.rank())
    throw std::invalid_argument("contract: rank of S exceeds rank of T");
  const int dim = t.dim();
  const int rs = s.rank();
  const int ro = t.rank() - rs;
  const auto& ls = tensor_layout(dim, rs);
  const auto& lo = tensor_layout(dim, ro);
  const auto& lt = t.layout();
  SymTensor out(dim, ro);
  std::vector<int> m(dim);
  for (std::size_t io = 0; io < lo.size; ++io) {
    auto mo = lo.multi_index(io);
    double acc = 0.0;
    for (std::size_t is = 0; is < ls.size; ++is) {
      if (s[is] == 0.0) continue;
      auto ms = ls.multi_index(is);
      for (int k = 0; k < dim; ++k) m[k] = mo[k] + ms[k];
      acc += ls.multinomial[is] * s[is] * t[lt.index_of(m)];
    }
    out[io] = acc;
  }
  return out;
}

bool approx_equal(const SymTensor& a, const SymTensor& b, double atol,
                  double rtol) {
  if (a.dim() != b.dim() || a.rank() != b.rank()) return false;
  const double scale = std::max(a.max_abs(), b.max_abs());
  const double tol = atol + rtol * scale;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > tol) return false;
  return true;
}

void accumulate_power_product(SymTensor& out, const Vector& x, int r,
                              const Vector& n, int s, double weight) {
  const int dim = out.dim();
  if (out.rank() != r + s || x.size() != dim || n.size() != dim)
    throw std::invalid_argument("accumulate_power_product: shape mismatch");
  thread_local std::vector<double> xm, nm;
  monomials(x, r, xm);
  monomials(n, s, nm);
  const auto& plan = product_plan(dim, r, s);
  auto co = out.coeffs();
  for (const auto& e : plan.entries)
    co[e.out] += weight * e.weight * xm[e.a] * nm[e.b];
}

void accumulate_power_times(SymTensor& out, const Vector& x, int r,
                            const SymTensor& g, double weight) {
  const int dim = out.dim();
  if (out.rank() != r + g.rank() || x.size() != dim || g.dim() != dim)
    throw std::invalid_argument("accumulate_power_times: shape mismatch");
  thread_local std::vector<double> xm;
  monomials(x, r, xm);
  const auto& plan = product_plan(dim, r, g.rank());
  auto co = out.coeffs();
  auto cg = g.coeffs();
  for (const auto& e : plan.entries)
    co[e.out] += weight * e.weight * xm[e.a] * cg[e.b];
}

}  // namespace crofton
