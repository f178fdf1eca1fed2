// Command line front end: constants, tensors, right-hand sides, single
// verifications and suites.

#include "crofton/bodies.hpp"
#include "crofton/crofton.hpp"
#include "crofton/errors.hpp"
#include "crofton/harness.hpp"
#include "crofton/minkowski.hpp"
#include "crofton/montecarlo.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>

using namespace crofton;
using Json = nlohmann::ordered_json;

namespace {

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

/// Flat file: {"basis": [[...], ...], "offset": [...]} with spanning vectors.
AffineFlat load_flat(const std::string& path, int dim) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open flat file " + path);
  const Json j = Json::parse(in);
  const auto basis = j.at("basis").get<std::vector<std::vector<double>>>();
  Matrix cols(dim, static_cast<Eigen::Index>(basis.size()));
  for (std::size_t c = 0; c < basis.size(); ++c) {
    if (static_cast<int>(basis[c].size()) != dim) throw DomainError("flat basis dimension mismatch");
    for (int i = 0; i < dim; ++i) cols(i, static_cast<Eigen::Index>(c)) = basis[c][i];
  }
  Vector offset = Vector::Zero(dim);
  if (j.contains("offset")) {
    const auto o = j.at("offset").get<std::vector<double>>();
    if (static_cast<int>(o.size()) != dim) throw DomainError("flat offset dimension mismatch");
    for (int i = 0; i < dim; ++i) offset[i] = o[i];
  }
  return AffineFlat(LinearFlat::from_spanning(cols), offset);
}

double max_abs_diff(const SymTensor& a, const SymTensor& b) {
  SymTensor d = a;
  d -= b;
  return d.max_abs();
}

/// Options shared by rhs, verify-rotational and verify-affine.
struct ExperimentOptions {
  std::string body;
  std::string theorem;
  ExperimentSpec spec;
  std::string psi_type = "minkowski";
  std::string output;

  void attach(CLI::App* app, bool with_samples) {
    app->add_option("--body", body, "Body JSON file")->required()->check(CLI::ExistingFile);
    app->add_option("--j", spec.j, "Flat dimension");
    app->add_option("--k", spec.k, "Index of the sectional functional");
    app->add_option("--r", spec.r, "Power of x");
    app->add_option("--s", spec.s, "Power of n");
    app->add_option("--variant", spec.variant, "aff-minkowski variant: auto|general|r0|kj1");
    app->add_option("--psi", psi_type, "Psi: minkowski|constant|norm_power");
    app->add_option("--psi-param", spec.psi_param, "Constant value or norm exponent");
    app->add_option("--order", spec.rhs.order, "Boundary cubature order");
    app->add_option("--facet-order", spec.rhs.facet_order, "Facet rule order (polytopes)");
    app->add_option("--facet-levels", spec.rhs.facet_levels, "Facet subdivision levels");
    app->add_option("--inner-samples", spec.rhs.inner_samples, "Inner Monte Carlo samples per node");
    app->add_option("--seed", spec.seed, "Random seed");
    if (with_samples) {
      app->add_option("--n-samples", spec.samples, "Monte Carlo samples")->check(CLI::Range(100L, 1L << 40));
      app->add_option("--section-order", spec.section_order, "Cubature order on sections");
      app->add_option("--ci", spec.ci, "CI multiplier");
      app->add_option("--atol", spec.atol, "Absolute tolerance floor");
      app->add_option("--max-rel-err", spec.max_rel_err, "Relative error cap (0 disables)");
      app->add_option("--rel-floor", spec.rel_floor, "Relative check applies where |rhs| exceeds this");
    }
    app->add_option("-o,--output", output, "Output file (default stdout)");
  }
};

int run_rhs(const ExperimentOptions& o) {
  const ConvexBody body = ConvexBody::load(o.body);
  ExperimentSpec spec = o.spec;
  spec.route = o.theorem;
  spec.psi = o.psi_type;
  const RhsValue v = evaluate_rhs(body, spec, spec.rhs);
  Json out;
  out["theorem"] = spec.route;
  out["tensor"] = Json::parse(v.value.to_json());
  if (v.value.rank() == 0) out["value"] = v.value.value();
  double err = v.se.max_abs();
  if (err == 0.0) {
    // Deterministic route: compare against a coarser cubature.
    RhsConfig coarse = spec.rhs;
    coarse.order = std::max(8, spec.rhs.order / 2);
    coarse.facet_levels = std::max(0, spec.rhs.facet_levels - 1);
    err = max_abs_diff(v.value, evaluate_rhs(body, spec, coarse).value);
  } else {
    out["se"] = Json::parse(v.se.to_json());
  }
  out["error_estimate"] = err;
  emit(out.dump(2) + "\n", o.output);
  return 0;
}

int run_verify(const ExperimentOptions& o, bool rotational, const std::string& samples_csv) {
  const ConvexBody body = ConvexBody::load(o.body);
  ExperimentSpec spec = o.spec;
  spec.psi = o.psi_type;
  spec.route = o.theorem;
  const int d = body.dim();
  if (spec.route.empty()) {
    if (rotational)
      spec.route = spec.j == 1 ? "rot-lines"
                   : spec.k == spec.j - 1 ? "rot-surface"
                   : spec.j == d - 1 ? "rot-hyper"
                                     : "rot-general";
    else
      spec.route = "aff-minkowski";
  }
  if (is_rotational(spec.route) != rotational)
    throw DomainError("theorem '" + spec.route + "' does not belong to this subcommand");
  spec.name = spec.route;
  const VerificationReport rep = verify(body, spec, 0, !samples_csv.empty());
  emit(rep.to_json() + "\n", o.output);
  if (!samples_csv.empty() && rep.lhs) {
    const std::size_t width = rep.lhs->mean.size();
    std::string csv = "sample";
    for (std::size_t q = 0; q < width; ++q) {
      csv += ",c";
      const auto m = rep.lhs->mean.layout().multi_index(q);
      for (int e : m) csv += std::to_string(e);
    }
    csv += '\n';
    for (std::size_t i = 0; i * width < rep.lhs->values.size(); ++i) {
      csv += std::to_string(i);
      for (std::size_t q = 0; q < width; ++q) csv += ',' + format_double(rep.lhs->values[i * width + q]);
      csv += '\n';
    }
    emit(csv, samples_csv);
  }
  if (rep.status != "ok") std::cerr << "crofton: " << rep.error << "\n";
  return rep.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rotational and affine Crofton formulae for Minkowski tensors"};
  app.require_subcommand(1);

  ConstantRanges ranges;
  std::string constants_out;
  auto* constants = app.add_subcommand("constants", "Dump constant tables as CSV");
  constants->add_option("--max-d", ranges.max_d, "Largest dimension")->check(CLI::Range(2, 12));
  constants->add_option("--max-s", ranges.max_s, "Largest s")->check(CLI::Range(0, 8));
  constants->add_option("-o,--output", constants_out, "Output file (default stdout)");

  std::string tensor_body, tensor_flat, tensor_out;
  int tk = 0, tr = 0, ts = 0, torder = kDefaultOrder;
  auto* tensor = app.add_subcommand("tensor", "Minkowski tensor of a body or of a section");
  tensor->add_option("--body", tensor_body, "Body JSON file")->required()->check(CLI::ExistingFile);
  tensor->add_option("--k", tk, "Index k")->required();
  tensor->add_option("--r", tr, "Power of x");
  tensor->add_option("--s", ts, "Power of n");
  tensor->add_option("--flat", tensor_flat, "Flat JSON file; computes the relative tensor of the section")
      ->check(CLI::ExistingFile);
  tensor->add_option("--order", torder, "Cubature order");
  tensor->add_option("-o,--output", tensor_out, "Output file (default stdout)");

  ExperimentOptions rhs_opts;
  auto* rhs = app.add_subcommand("rhs", "Evaluate the right-hand side of a formula");
  rhs->add_option("--theorem", rhs_opts.theorem,
                  "rot-general|rot-surface|rot-lines|rot-hyper|aff-general|aff-psi|aff-minkowski|"
                  "aff-harmonic|aff-classical")
      ->required();
  rhs_opts.attach(rhs, false);

  ExperimentOptions rot_opts, aff_opts;
  std::string rot_csv, aff_csv;
  auto* vrot = app.add_subcommand("verify-rotational", "Monte Carlo check of a rotational formula");
  vrot->add_option("--theorem", rot_opts.theorem, "rot-surface|rot-lines|rot-hyper|rot-general");
  rot_opts.attach(vrot, true);
  vrot->add_option("--samples-csv", rot_csv, "Write per-sample values as CSV");
  auto* vaff = app.add_subcommand("verify-affine", "Monte Carlo check of an affine formula");
  vaff->add_option("--theorem", aff_opts.theorem,
                   "aff-minkowski|aff-harmonic|aff-psi|aff-general|aff-classical");
  aff_opts.attach(vaff, true);
  vaff->add_option("--samples-csv", aff_csv, "Write per-sample values as CSV");

  std::string suite_path, suite_out;
  int suite_workers = 0;
  auto* suite = app.add_subcommand("suite", "Run a JSON experiment suite");
  suite->add_option("file", suite_path, "Suite JSON file")->required()->check(CLI::ExistingFile);
  suite->add_option("-o,--output-dir", suite_out, "Output directory");
  suite->add_option("--workers", suite_workers, "Worker cap (default CROFTON_WORKERS or all cores)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*constants) {
      emit(dump_constants(ranges), constants_out);
      return 0;
    }
    if (*tensor) {
      const ConvexBody body = ConvexBody::load(tensor_body);
      Json out;
      SymTensor value, coarse;
      if (tensor_flat.empty()) {
        const TensorEstimate est = phi_with_error(body, tk, tr, ts, torder);
        value = est.value;
        out["tensor"] = Json::parse(value.to_json());
        out["error_estimate"] = est.error;
      } else {
        const AffineFlat flat = load_flat(tensor_flat, body.dim());
        const Section sec = section(body, flat);
        if (sec.status == SectionStatus::tangential)
          throw DomainError("the flat only touches the body");
        const int rank = tr + ts;
        value = SymTensor(body.dim(), rank);
        coarse = SymTensor(body.dim(), rank);
        if (sec.status == SectionStatus::ok) {
          value = phi_relative(*sec.body, tk, tr, ts, flat, torder);
          coarse = phi_relative(*sec.body, tk, tr, ts, flat, std::max(8, torder / 2));
        }
        out["section"] = sec.status == SectionStatus::ok ? "ok" : "empty";
        out["tensor"] = Json::parse(value.to_json());
        out["error_estimate"] = max_abs_diff(value, coarse);
      }
      emit(out.dump(2) + "\n", tensor_out);
      return 0;
    }
    if (*rhs) return run_rhs(rhs_opts);
    if (*vrot) return run_verify(rot_opts, true, rot_csv);
    if (*vaff) return run_verify(aff_opts, false, aff_csv);
    if (*suite) {
      SuiteOptions opts;
      opts.output_dir = suite_out;
      opts.workers = suite_workers;
      const SuiteResult res = run_suite(std::filesystem::path(suite_path), opts);
      int passed = 0;
      for (const auto& r : res.reports) passed += r.pass ? 1 : 0;
      std::cout << passed << "/" << res.reports.size() << " experiments passed; results in "
                << res.output_dir.string() << "\n";
      return res.exit_code();
    }
  } catch (const std::exception& e) {
    std::cerr << "crofton: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
