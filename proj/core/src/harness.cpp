#include "crofton/harness.hpp"

#include "crofton/errors.hpp"
#include "crofton/rng.hpp"
#include "crofton/specfun.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace crofton {
namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

bool valid_name(const std::string& name) {
  return !name.empty() && std::all_of(name.begin(), name.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  });
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// One CSV row of the constants table; unused parameters are left empty.
struct Row {
  std::string table;
  int d = -1, j = -1, k = -1, s = -1, p = -1, l = -1, b = -1;
  double m = std::nan("");
  double value = 0.0;
  double reference = std::nan("");
};

std::string int_cell(int v) { return v < 0 ? std::string() : std::to_string(v); }
std::string num_cell(double v) { return std::isnan(v) ? std::string() : format_double(v); }

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

ExperimentSuite load_suite(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open suite file " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const std::exception& e) {
    throw DomainError("malformed suite " + path.string() + ": " + e.what());
  }
  if (!j.is_object() || !j.contains("experiments") || !j.at("experiments").is_array())
    throw DomainError("malformed suite " + path.string() + ": need an 'experiments' array");
  const fs::path base = path.parent_path();
  ExperimentSuite suite;
  suite.seed = j.value("seed", std::uint64_t{0});
  if (j.contains("output_dir")) suite.output_dir = base / j.at("output_dir").get<std::string>();
  std::set<std::string> names;
  for (const Json& e : j.at("experiments")) {
    try {
      if (!e.contains("body")) throw DomainError("missing 'body'");
      const Json& b = e.at("body");
      ConvexBody body = b.is_string() ? ConvexBody::load((base / b.get<std::string>()).string())
                                      : ConvexBody::from_json(b.dump());
      ExperimentSpec spec = ExperimentSpec::from_json(e.dump());
      if (!valid_name(spec.name))
        throw DomainError("experiment names must be non-empty and use [A-Za-z0-9_.-]");
      if (!names.insert(spec.name).second) throw DomainError("duplicate name");
      if (!e.contains("seed")) spec.seed = derive_seed(suite.seed, spec.name);
      suite.experiments.push_back({std::move(spec), std::move(body)});
    } catch (const std::exception& ex) {
      throw DomainError("malformed suite " + path.string() + ", experiment '" +
                        e.value("name", std::string("?")) + "': " + ex.what());
    }
  }
  return suite;
}

std::string summary_csv(const std::vector<VerificationReport>& reports) {
  std::string out = "experiment,lhs,rhs,z_max,pass,coordinate,status\n";
  for (const VerificationReport& r : reports) {
    out += r.name;
    if (r.status == "ok") {
      out += ',' + format_double(r.lhs->mean[r.worst]);
      out += ',' + format_double(r.rhs->value[r.worst]);
      out += ',' + (std::isfinite(r.z_max) ? format_double(r.z_max) : std::string("inf"));
    } else {
      out += ",,,";
    }
    out += r.pass ? ",true," : ",false,";
    if (r.status == "ok") {
      const auto m = r.lhs->mean.layout().multi_index(r.worst);
      for (std::size_t q = 0; q < m.size(); ++q) out += (q ? ";" : "") + std::to_string(m[q]);
    }
    out += ',' + (r.status == "ok" ? r.status : r.error_type) + '\n';
  }
  return out;
}

SuiteResult run_suite(const ExperimentSuite& suite, const SuiteOptions& options) {
  SuiteResult result;
  result.output_dir = !options.output_dir.empty() ? options.output_dir
                      : !suite.output_dir.empty() ? suite.output_dir
                                                  : fs::path("crofton-results");
  fs::create_directories(result.output_dir);
  const std::string started = utc_now();

  const int n = static_cast<int>(suite.experiments.size());
  const int cap = options.workers > 0 ? options.workers : default_workers();
  const int outer = std::max(1, std::min(cap, n));
  const int inner = std::max(1, cap / outer);
  result.reports.resize(suite.experiments.size());
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < n; i = next++) {
      const SuiteExperiment& e = suite.experiments[static_cast<std::size_t>(i)];
      result.reports[static_cast<std::size_t>(i)] = verify(e.body, e.spec, inner);
    }
  };
  if (outer == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < outer; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  Json timings = Json::array();
  for (const VerificationReport& r : result.reports) {
    write_file(result.output_dir / (r.name + ".json"), r.to_json() + "\n");
    timings.push_back(Json{{"name", r.name}, {"runtime_s", r.runtime_s}});
    result.all_pass = result.all_pass && r.pass;
  }
  write_file(result.output_dir / "summary.csv", summary_csv(result.reports));
  Json meta;
  meta["schema"] = "crofton-metadata/1";
  meta["started"] = started;
  meta["finished"] = utc_now();
  meta["workers"] = cap;
  meta["experiments"] = std::move(timings);
  write_file(result.output_dir / "metadata.json", meta.dump(2) + "\n");
  return result;
}

SuiteResult run_suite(const fs::path& path, const SuiteOptions& options) {
  return run_suite(load_suite(path), options);
}

std::string dump_constants(const ConstantRanges& ranges) {
  if (ranges.max_d < 2 || ranges.max_s < 0) throw DomainError("dump_constants: need max_d >= 2, max_s >= 0");
  std::vector<Row> rows;
  for (int k = 1; k <= std::max(10, ranges.max_d); ++k) {
    Row r{"sigma"};
    r.k = k;
    r.value = sphere_area(k);
    r.reference = 2.0 * std::pow(std::numbers::pi, 0.5 * k) / std::tgamma(0.5 * k);
    rows.push_back(r);
  }
  for (int d = 1; d <= ranges.max_d; ++d)
    for (int j = 0; j <= d; ++j) {
      Row r{"c"};
      r.d = d;
      r.j = j;
      r.value = grassmann_total(d, j);
      rows.push_back(r);
    }
  for (int d = 2; d <= ranges.max_d; ++d)
    for (int j = 1; j < d; ++j)
      for (int k = 0; k < j; ++k) {
        Row r{"C"};
        r.d = d;
        r.j = j;
        r.k = k;
        r.value = c_affine(d, j, k);
        rows.push_back(r);
      }
  for (int d = 2; d <= ranges.max_d; ++d)
    for (int j = 1; j < d; ++j)
      for (int k = 0; k < j; ++k)
        for (int s = 0; s <= ranges.max_s; ++s)
          for (int p = 0; 2 * p <= s; ++p) {
            const ChiForms f = chi_forms(d, j, k, s, p);
            Row r{"chi"};
            r.d = d;
            r.j = j;
            r.k = k;
            r.s = s;
            r.p = p;
            r.value = f.finite_sum;
            // The farther of the two other representations.
            r.reference = std::abs(f.pochhammer_sum - f.finite_sum) >
                                  std::abs(f.hypergeometric - f.finite_sum)
                              ? f.pochhammer_sum
                              : f.hypergeometric;
            rows.push_back(r);
          }
  for (int d = 3; d <= std::min(ranges.max_d, 5); ++d)
    for (int j = 1; j < d; ++j)
      for (int s = 0; s <= ranges.max_s; ++s) {
        Row r{"a"};
        r.d = d;
        r.j = j;
        r.s = s;
        r.value = a_constant(s, j, d);
        r.reference = a_constant_quadrature(s, j, d);
        rows.push_back(r);
      }
  for (int d = 3; d <= ranges.max_d; ++d)
    for (int j = 2; j < d; ++j)
      for (int s = 0; s <= ranges.max_s; ++s)
        for (int l = 0; 2 * l <= s; ++l)
          for (int b = 0; b + 2 * l <= s; ++b)
            for (double m : {0.0, 0.3, 0.7, 0.95}) {
              Row r{"F"};
              r.d = d;
              r.j = j;
              r.s = s;
              r.l = l;
              r.b = b;
              r.m = m;
              r.value = f_integral(d, j, s, l, b, m);
              rows.push_back(r);
            }

  std::string out = "table,d,j,k,s,p,l,b,m,value,reference,abs_diff\n";
  for (const Row& r : rows) {
    out += r.table + ',' + int_cell(r.d) + ',' + int_cell(r.j) + ',' + int_cell(r.k) + ',' +
           int_cell(r.s) + ',' + int_cell(r.p) + ',' + int_cell(r.l) + ',' + int_cell(r.b) + ',' +
           num_cell(r.m) + ',' + format_double(r.value) + ',' + num_cell(r.reference) + ',' +
           (std::isnan(r.reference) ? std::string() : format_double(std::abs(r.value - r.reference))) +
           '\n';
  }
  return out;
}

}  // namespace crofton
