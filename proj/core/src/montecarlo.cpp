#include "crofton/montecarlo.hpp"

#include "crofton/errors.hpp"
#include "crofton/minkowski.hpp"
#include "crofton/rng.hpp"
#include "crofton/specfun.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <thread>

#include <json.hpp>

namespace crofton {
namespace {

using Json = nlohmann::ordered_json;

/// Samples per work unit. Chunks are reduced in index order, so the result
/// does not depend on the number of workers.
constexpr long kChunk = 512;

struct ChunkStats {
  long count = 0;
  std::vector<double> mean;
  std::vector<double> m2;
  long empty = 0;
  long tangential = 0;
  std::vector<double> values;
};

/// Pairwise update of (count, mean, M2).
void merge(ChunkStats& into, const ChunkStats& from) {
  if (from.count > 0) {
    if (into.count == 0) {
      into.mean = from.mean;
      into.m2 = from.m2;
    } else {
      const double na = static_cast<double>(into.count);
      const double nb = static_cast<double>(from.count);
      const double n = na + nb;
      for (std::size_t i = 0; i < into.mean.size(); ++i) {
        const double delta = from.mean[i] - into.mean[i];
        into.mean[i] += delta * nb / n;
        into.m2[i] += from.m2[i] + delta * delta * na * nb / n;
      }
    }
    into.count += from.count;
  }
  into.empty += from.empty;
  into.tangential += from.tangential;
  into.values.insert(into.values.end(), from.values.begin(), from.values.end());
}

/// Draws sample `index` and returns its value; sets the section status.
using SampleFn = std::function<SymTensor(long index, SectionStatus& status)>;

Estimate run_estimator(int dim, int rank, const SampleFn& sample, const EstimatorConfig& cfg) {
  if (cfg.samples < 2) throw DomainError("estimator needs at least 2 samples");
  const long chunks = (cfg.samples + kChunk - 1) / kChunk;
  const std::size_t width = SymTensor(dim, rank).size();
  std::vector<ChunkStats> results(static_cast<std::size_t>(chunks));
  std::atomic<long> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};

  auto worker = [&] {
    for (long c = next++; c < chunks && !failed; c = next++) {
      try {
        ChunkStats& st = results[static_cast<std::size_t>(c)];
        st.mean.assign(width, 0.0);
        st.m2.assign(width, 0.0);
        const long begin = c * kChunk;
        const long end = std::min(cfg.samples, begin + kChunk);
        for (long i = begin; i < end; ++i) {
          SectionStatus status = SectionStatus::ok;
          const SymTensor v = sample(i, status);
          if (status == SectionStatus::empty) ++st.empty;
          if (status == SectionStatus::tangential) ++st.tangential;
          ++st.count;
          for (std::size_t q = 0; q < width; ++q) {
            const double delta = v[q] - st.mean[q];
            st.mean[q] += delta / static_cast<double>(st.count);
            st.m2[q] += delta * (v[q] - st.mean[q]);
          }
          if (cfg.keep_samples) st.values.insert(st.values.end(), v.coeffs().begin(), v.coeffs().end());
        }
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };

  const int workers =
      static_cast<int>(std::min<long>(chunks, cfg.workers > 0 ? cfg.workers : default_workers()));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  ChunkStats total;
  for (const ChunkStats& st : results) merge(total, st);
  Estimate est{SymTensor(dim, rank), SymTensor(dim, rank), total.count, total.empty,
               total.tangential, std::move(total.values)};
  const double n = static_cast<double>(total.count);
  for (std::size_t q = 0; q < width; ++q) {
    est.mean[q] = total.mean[q];
    est.se[q] = std::sqrt(std::max(0.0, total.m2[q] / (n - 1.0) / n));
  }
  return est;
}

std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const OriginOnBoundaryError*>(&e)) return "origin_on_boundary";
  if (dynamic_cast<const UnsupportedError*>(&e)) return "unsupported";
  if (dynamic_cast<const ConvergenceError*>(&e)) return "convergence";
  if (dynamic_cast<const DomainError*>(&e)) return "domain";
  return "error";
}

Json tensor_entries(const SymTensor& t) {
  Json arr = Json::array();
  for (std::size_t i = 0; i < t.size(); ++i) arr.push_back(t[i]);
  return arr;
}

std::string coordinate_label(const SymTensor& t, std::size_t i) {
  std::string key;
  auto m = t.layout().multi_index(i);
  for (int q = 0; q < t.dim(); ++q) {
    if (q) key += ',';
    key += std::to_string(m[q]);
  }
  return key;
}

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

Functional Functional::phi(int k, int r, int s, int order) {
  Functional f;
  f.kind = Kind::phi;
  f.k = k;
  f.r = r;
  f.s = s;
  f.order = order;
  return f;
}

Functional Functional::xi(int r, int s, int order) {
  Functional f;
  f.kind = Kind::xi;
  f.r = r;
  f.s = s;
  f.order = order;
  return f;
}

Functional Functional::of_psi(PsiFunction psi, int k, int order) {
  Functional f;
  f.kind = Kind::psi;
  f.k = k;
  f.psi = std::move(psi);
  f.order = order;
  return f;
}

int Functional::rank() const { return kind == Kind::psi ? psi->rank : r + s; }

SymTensor Functional::evaluate(const Section& sec, const AffineFlat& flat, int dim) const {
  if (sec.status != SectionStatus::ok) return SymTensor(dim, rank());
  const ConvexBody& body = *sec.body;
  switch (kind) {
    case Kind::phi:
      return phi_relative(body, k, r, s, flat, order);
    case Kind::xi:
      return xi_tilde_relative(body, r, s, flat, order);
    case Kind::psi: {
      SymTensor out(dim, psi->rank);
      for (const CurvatureNode& node : curvature_nodes(body, k, &flat, order))
        out.add_scaled((*psi)(flat.base(), node.x, node.n), node.weight);
      return out;
    }
  }
  return SymTensor(dim, rank());
}

int default_workers() {
  if (const char* env = std::getenv("CROFTON_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<int>(std::min(v, 1024L));
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

Estimate estimate_rot_lhs(const ConvexBody& body, int j, const Functional& f,
                          const EstimatorConfig& cfg) {
  const int d = body.dim();
  if (!(0 < j && j < d)) throw DomainError("estimate_rot_lhs: need 0 < j < d");
  validate_rotational(body);
  const double mass = grassmann_total(d, j);
  SampleFn sample = [&](long i, SectionStatus& status) {
    Rng rng(cfg.seed, static_cast<std::uint64_t>(i));
    const AffineFlat flat(sample_linear(d, j, rng));
    const Section sec = section(body, flat);
    status = sec.status;
    SymTensor v = f.evaluate(sec, flat, d);
    v *= mass;
    return v;
  };
  return run_estimator(d, f.rank(), sample, cfg);
}

Estimate estimate_aff_lhs(const ConvexBody& body, int j, const Functional& f,
                          const EstimatorConfig& cfg) {
  const int d = body.dim();
  if (!(0 < j && j < d)) throw DomainError("estimate_aff_lhs: need 0 < j < d");
  SampleFn sample = [&](long i, SectionStatus& status) {
    Rng rng(cfg.seed, static_cast<std::uint64_t>(i));
    const WeightedFlat wf = sample_affine_hitting(body, j, rng);
    const Section sec = section(body, wf.flat);
    status = sec.status;
    SymTensor v = f.evaluate(sec, wf.flat, d);
    v *= wf.weight;
    return v;
  };
  return run_estimator(d, f.rank(), sample, cfg);
}

ExperimentSpec ExperimentSpec::from_json(std::string_view text) {
  const Json j = Json::parse(text);
  ExperimentSpec e;
  e.name = j.value("name", std::string());
  e.route = j.at("route").get<std::string>();
  e.j = j.value("j", e.j);
  e.k = j.value("k", e.k);
  e.r = j.value("r", e.r);
  e.s = j.value("s", e.s);
  e.variant = j.value("variant", e.variant);
  if (j.contains("psi")) {
    const Json& p = j.at("psi");
    if (p.is_string()) {
      e.psi = p.get<std::string>();
    } else {
      e.psi = p.at("type").get<std::string>();
      e.psi_param = p.value("param", e.psi_param);
    }
  }
  e.samples = j.value("n_samples", e.samples);
  e.seed = j.value("seed", e.seed);
  e.section_order = j.value("section_order", e.section_order);
  e.rhs.order = j.value("order", e.rhs.order);
  e.rhs.facet_order = j.value("facet_order", e.rhs.facet_order);
  e.rhs.facet_levels = j.value("facet_levels", e.rhs.facet_levels);
  e.rhs.inner_samples = j.value("inner_samples", e.rhs.inner_samples);
  e.ci = j.value("ci", e.ci);
  e.atol = j.value("atol", e.atol);
  e.max_rel_err = j.value("max_rel_err", e.max_rel_err);
  e.rel_floor = j.value("rel_floor", e.rel_floor);
  if (e.samples < 100) throw DomainError("experiment '" + e.name + "': n_samples must be >= 100");
  if (e.ci <= 0.0) throw DomainError("experiment '" + e.name + "': ci must be positive");
  return e;
}

std::string ExperimentSpec::to_json() const {
  Json j;
  j["name"] = name;
  j["route"] = route;
  j["j"] = this->j;
  j["k"] = k;
  j["r"] = r;
  j["s"] = s;
  j["variant"] = variant;
  j["psi"] = Json{{"type", psi}, {"param", psi_param}};
  j["n_samples"] = samples;
  j["seed"] = seed;
  j["section_order"] = section_order;
  j["order"] = rhs.order;
  j["facet_order"] = rhs.facet_order;
  j["facet_levels"] = rhs.facet_levels;
  j["inner_samples"] = rhs.inner_samples;
  j["ci"] = ci;
  j["atol"] = atol;
  j["max_rel_err"] = max_rel_err;
  j["rel_floor"] = rel_floor;
  return j.dump();
}

PsiFunction make_psi(const ExperimentSpec& spec, int dim) {
  if (spec.psi == "minkowski") return PsiFunction::minkowski(dim, spec.j, spec.k, spec.r, spec.s);
  if (spec.psi == "constant") return PsiFunction::constant(dim, spec.psi_param);
  if (spec.psi == "norm_power") return PsiFunction::norm_power(dim, spec.psi_param);
  throw DomainError("unknown psi '" + spec.psi + "' (minkowski|constant|norm_power)");
}

std::string VerificationReport::to_json() const {
  Json j;
  j["schema"] = "crofton-report/1";
  j["name"] = name;
  j["route"] = route;
  j["body"] = body_kind;
  j["dim"] = dim;
  j["experiment"] = Json::parse(spec.to_json());
  j["status"] = status;
  if (status != "ok") {
    j["error_type"] = error_type;
    j["error"] = error;
    j["pass"] = false;
    return j.dump(2);
  }
  j["rank"] = lhs->mean.rank();
  j["samples"] = lhs->samples;
  j["empty_sections"] = lhs->empty;
  j["tangential_sections"] = lhs->tangential;
  Json coords = Json::array();
  for (std::size_t i = 0; i < lhs->mean.size(); ++i) {
    Json c;
    c["index"] = coordinate_label(lhs->mean, i);
    c["lhs"] = lhs->mean[i];
    c["lhs_se"] = lhs->se[i];
    c["rhs"] = rhs->value[i];
    c["rhs_se"] = rhs->se[i];
    c["z"] = finite_or_null(z[i]);
    c["rel_err"] = finite_or_null(rel_err[i]);
    coords.push_back(std::move(c));
  }
  j["coordinates"] = std::move(coords);
  j["lhs"] = tensor_entries(lhs->mean);
  j["rhs"] = tensor_entries(rhs->value);
  j["z_max"] = finite_or_null(z_max);
  j["worst_coordinate"] = coordinate_label(lhs->mean, worst);
  j["pass"] = pass;
  return j.dump(2);
}

bool is_rotational(const std::string& route) { return route.rfind("rot-", 0) == 0; }

Functional route_functional(const ExperimentSpec& spec, int dim) {
  const int ord = spec.section_order;
  const std::string& route = spec.route;
  if (route == "rot-surface") return Functional::phi(spec.j - 1, spec.r, spec.s, ord);
  if (route == "rot-lines") return Functional::phi(0, spec.r, spec.s, ord);
  if (route == "rot-hyper" || route == "aff-minkowski")
    return Functional::phi(spec.k, spec.r, spec.s, ord);
  if (route == "aff-harmonic") return Functional::xi(spec.r, spec.s, ord);
  if (route == "aff-classical")
    return Functional::of_psi(PsiFunction::constant(dim, 1.0), spec.k, ord);
  if (route == "rot-general" || route == "aff-psi" || route == "aff-general")
    return spec.psi == "minkowski" ? Functional::phi(spec.k, spec.r, spec.s, ord)
                                   : Functional::of_psi(make_psi(spec, dim), spec.k, ord);
  throw DomainError("unknown route '" + route + "'");
}

RhsValue evaluate_rhs(const ConvexBody& body, const ExperimentSpec& spec, const RhsConfig& cfg) {
  const int d = body.dim();
  const std::string& route = spec.route;
  if (route == "rot-surface") return rot_rhs_surface(body, spec.j, spec.r, spec.s, cfg);
  if (route == "rot-lines") {
    if (spec.j != 1) throw DomainError("rot-lines needs j = 1");
    return rot_rhs_lines(body, spec.r, spec.s, cfg);
  }
  if (route == "rot-hyper") {
    if (spec.j != d - 1) throw DomainError("rot-hyper needs j = d-1");
    return rot_rhs_hyperplanes(body, spec.k, spec.r, spec.s, cfg);
  }
  if (route == "rot-general") return rot_rhs_general(body, make_psi(spec, d), spec.j, spec.k, cfg);
  if (route == "aff-minkowski")
    return aff_rhs_minkowski(body, spec.j, spec.k, spec.r, spec.s,
                             parse_minkowski_route(spec.variant), cfg);
  if (route == "aff-harmonic") return aff_rhs_harmonic(body, spec.j, spec.r, spec.s, cfg);
  if (route == "aff-general") return aff_rhs_general(body, make_psi(spec, d), spec.j, spec.k, cfg);
  if (route == "aff-psi") {
    const PsiFunction psi = make_psi(spec, d);
    return psi.uses_n ? aff_rhs_psi_xn(body, psi, spec.j, spec.k, cfg)
                      : aff_rhs_psi_x(body, psi, spec.j, spec.k, cfg);
  }
  if (route == "aff-classical")
    return aff_rhs_psi_x(body, PsiFunction::constant(d, 1.0), spec.j, spec.k, cfg);
  throw DomainError("unknown route '" + route + "'");
}

VerificationReport verify(const ConvexBody& body, const ExperimentSpec& spec, int workers,
                          bool keep_samples) {
  const auto start = std::chrono::steady_clock::now();
  const int d = body.dim();
  VerificationReport rep;
  rep.name = spec.name;
  rep.route = spec.route;
  rep.body_kind = body.kind_name();
  rep.dim = d;
  rep.spec = spec;
  try {
    const EstimatorConfig ec{spec.samples, spec.seed, workers, keep_samples};
    RhsConfig rc = spec.rhs;
    rc.seed = derive_seed(spec.seed, "rhs");
    const bool rotational = is_rotational(spec.route);
    if (rotational) validate_rotational(body);

    const Functional f = route_functional(spec, d);
    const RhsValue rhs = evaluate_rhs(body, spec, rc);
    if (rhs.value.rank() != f.rank()) throw DomainError("route produced mismatched tensor ranks");

    Estimate lhs = rotational ? estimate_rot_lhs(body, spec.j, f, ec)
                              : estimate_aff_lhs(body, spec.j, f, ec);
    const std::size_t n = lhs.mean.size();
    rep.z.assign(n, 0.0);
    rep.rel_err.assign(n, 0.0);
    rep.pass = true;
    double worst_ratio = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double diff = lhs.mean[i] - rhs.value[i];
      const double se = std::hypot(lhs.se[i], rhs.se[i]);
      rep.z[i] = se > 0.0 ? diff / se : (diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
      rep.z_max = std::max(rep.z_max, std::abs(rep.z[i]));
      const double tol = std::max(spec.ci * se, spec.atol);
      bool ok = std::abs(diff) <= tol;
      const bool rel_checked = std::abs(rhs.value[i]) > spec.rel_floor;
      rep.rel_err[i] = rel_checked ? std::abs(diff) / std::abs(rhs.value[i])
                                   : std::numeric_limits<double>::quiet_NaN();
      if (rel_checked && spec.max_rel_err > 0.0 && rep.rel_err[i] > spec.max_rel_err) ok = false;
      rep.pass = rep.pass && ok;
      double ratio = std::abs(diff) / tol;
      if (rel_checked && spec.max_rel_err > 0.0)
        ratio = std::max(ratio, rep.rel_err[i] / spec.max_rel_err);
      if (ratio > worst_ratio) {
        worst_ratio = ratio;
        rep.worst = i;
      }
    }
    rep.lhs = std::move(lhs);
    rep.rhs = std::move(rhs);
  } catch (const std::exception& e) {
    rep.status = "error";
    rep.error_type = error_kind(e);
    rep.error = e.what();
    rep.pass = false;
    rep.lhs.reset();
    rep.rhs.reset();
  }
  rep.runtime_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

}  // namespace crofton
