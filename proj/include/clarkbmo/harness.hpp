#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "clarkbmo/circle.hpp"

namespace clarkbmo {

struct ExperimentConfig {
  std::uint64_t seed = 42;
  int trials = 200;
  std::vector<std::size_t> n_values{1, 2, 4, 8, 16};
  std::vector<std::size_t> degree_values{1, 2, 3, 4, 6};
  std::size_t grid_M = 4096;
  std::map<std::string, double> tolerances;
  std::string output_path;
  /// Stand-in for the unknown maximal-operator norm in the upper ratio bound.
  double m_bound = 10.0;
  /// Symbols drawn per random inner function in the theorem3 sweep.
  int symbols_per_theta = 4;

  /// Named tolerance with a fallback.
  double tolerance(const std::string& name, double fallback) const;
};

/// Fields absent from the JSON keep their defaults; unknown fields are rejected.
ExperimentConfig config_from_json(std::string_view text);
std::string to_json(const ExperimentConfig& c);

/// Independent stream per (seed, stream, trial), so trials can be drawn in any order.
class TrialRng {
 public:
  TrialRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t trial);

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Complex standard normal, E|z|^2 = 1.
  cplx normal();
  cplx unimodular();
  /// Uniform in the disk of radius r.
  cplx in_disk(double r);
  std::size_t below(std::size_t n);

 private:
  double gaussian();
  std::mt19937_64 engine_;
};

struct ReportRow {
  std::string experiment;
  std::size_t n_or_degree = 0;
  int trial = 0;
  double op_norm = 0.0;
  double bmo_norm = 0.0;
  double ratio = 0.0;
  std::string witness;  ///< JSON sufficient to recompute the ratio
};

struct RatioEnvelope {
  std::size_t key = 0;
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  int count = 0;
  int skipped = 0;
};

struct ExperimentReport {
  std::string experiment;
  std::vector<ReportRow> rows;
  std::vector<RatioEnvelope> envelopes;
  std::map<std::string, double> metrics;
  std::vector<std::string> failures;

  bool passed() const { return failures.empty(); }
};

ExperimentReport run_corollary1(const ExperimentConfig& cfg);
ExperimentReport run_theorem3(const ExperimentConfig& cfg);
ExperimentReport run_atom_extension_bound(const ExperimentConfig& cfg);
ExperimentReport run_cz_vs_lp(const ExperimentConfig& cfg);

struct IdentityCheck {
  std::string name;
  double max_residual = 0.0;
  double tolerance = 0.0;
  int instances = 0;
  bool passed() const { return max_residual <= tolerance; }
};

struct IdentityReport {
  std::vector<IdentityCheck> checks;
  bool passed() const;
};

/// mass_scale != 1 corrupts every Clark mass before the Herglotz check (fault injection).
IdentityReport run_identity_suite(const ExperimentConfig& cfg, double mass_scale = 1.0);

/// Columns experiment,n_or_degree,trial,op_norm,bmo_norm,ratio,witness_ref; floats at 17 digits.
std::string to_csv(const ExperimentReport& r);
std::string to_json(const ExperimentReport& r);
std::string to_json(const IdentityReport& r);
std::vector<ReportRow> parse_csv_report(std::string_view text);

/// Ratio recomputed from the stored witness alone.
double recompute_ratio(const ReportRow& row);

struct VerifyResult {
  int checked = 0;
  double max_deviation = 0.0;
  std::vector<std::string> failures;
};

/// Recomputes `count` rows chosen by the seed and compares within tol (relative to max(1, ratio)).
VerifyResult verify_report(std::string_view csv, int count = 10, std::uint64_t seed = 42, double tol = 1e-8);

}  // namespace clarkbmo
