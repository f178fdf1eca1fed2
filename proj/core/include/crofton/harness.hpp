#pragma once

#include "crofton/bodies.hpp"
#include "crofton/montecarlo.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace crofton {

struct SuiteExperiment {
  ExperimentSpec spec;
  ConvexBody body;
};

/// Named experiments with their bodies. Seeds of experiments without an
/// explicit seed are derived from the suite seed and the experiment name.
struct ExperimentSuite {
  std::uint64_t seed = 0;
  std::vector<SuiteExperiment> experiments;
  /// From the suite file, resolved against its directory; may be empty.
  std::filesystem::path output_dir;
};

/// Parses a suite file. Body paths are relative to the suite file; bodies
/// may also be given inline. Throws DomainError on malformed suites.
ExperimentSuite load_suite(const std::filesystem::path& path);

struct SuiteOptions {
  /// Overrides the suite's output directory when non-empty.
  std::filesystem::path output_dir;
  /// Worker cap; 0 means default_workers().
  int workers = 0;
};

struct SuiteResult {
  std::vector<VerificationReport> reports;
  std::filesystem::path output_dir;
  bool all_pass = true;
  int exit_code() const { return all_pass ? 0 : 1; }
};

/// Runs every experiment and writes <name>.json per experiment, summary.csv
/// and metadata.json (timings) to the output directory.
SuiteResult run_suite(const ExperimentSuite& suite, const SuiteOptions& options);
SuiteResult run_suite(const std::filesystem::path& path, const SuiteOptions& options);

/// Aggregate CSV: experiment,lhs,rhs,z_max,pass,coordinate,status. The lhs
/// and rhs columns hold the worst coordinate.
std::string summary_csv(const std::vector<VerificationReport>& reports);

/// Shortest round-trip decimal form, independent of the locale.
std::string format_double(double v);

struct ConstantRanges {
  int max_d = 6;
  int max_s = 4;
};

/// Tables of sigma, c, C, chi, a and F as CSV with the columns
/// table,d,j,k,s,p,l,b,m,value,reference,abs_diff. Reference columns hold
/// an independent evaluation where one exists.
std::string dump_constants(const ConstantRanges& ranges = {});

}  // namespace crofton
