#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mmfbeam/types.hpp"

namespace mmfbeam::harness {

enum class Algorithm { Sea, SdrUpper, SdrD, SdrG, Heuristic, Unicast };

const char* to_string(Algorithm a);
Algorithm parse_algorithm(const std::string& name);

struct AlgoParams {
  double eps = 0.1;
  double kappa = 0.96;
  double zeta = 30.0;
  int n_candidates = 300;
  int heuristic_iters = -1;  // -1 means S = K
  double emphasis_r = 1.1;
  bool heuristic_reg_normalized = true;  // sigma^2/P_max regularizer when true
  double tol_gap = 1e-7;
  double tol_feas = 1e-8;
  double tol_rank = 1e-4;
  int max_elim = 50;
  int solver_max_iter = 100;
};

struct CampaignSpec {
  ScenarioConfig scenario;
  std::vector<Algorithm> algorithms;
  int trials = 1;
  int threads = 1;
  std::string out_dir = "results";
  AlgoParams params;

  void validate() const;
};

/// Built-in scenarios: small (CI-sized), mid, paper9x4, paper4x8.
CampaignSpec preset(const std::string& name);

/// INI-style config with [scenario], [algorithms], [params] sections.
CampaignSpec load_config(const std::string& path);
CampaignSpec parse_config(std::istream& is);

struct TrialRecord {
  int trial = 0;
  std::uint64_t seed = 0;
  Algorithm algo = Algorithm::Unicast;
  double min_se = 0.0;
  double sum_se = 0.0;
  double runtime_ms = 0.0;
  int elim_iters = 0;
  int bisect_iters = 0;
  int max_rank_final = 0;
  std::string status = "ok";
  // diagnostics beyond the CSV schema
  double t_star = 0.0;
  double relaxed_gamma = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t channel_fingerprint = 0;
  std::vector<double> group_min_se;
  std::vector<double> ap_power;
};

/// One channel realization (seed xor trial index), every requested algorithm
/// on it. SDR-D/SDR-G/sdr_upper share a single relaxed bisection, which also
/// seeds the SEA. Per-algorithm failures end up in the status column.
std::vector<TrialRecord> run_trial(const CampaignSpec& spec, int trial_index);

struct AlgorithmSummary {
  Algorithm algo;
  int records = 0;
  double mean_min_se = 0.0;
  double p10_min_se = 0.0;
  double p50_min_se = 0.0;
  double p90_min_se = 0.0;
  double mean_runtime_ms = 0.0;
  double median_runtime_ms = 0.0;
  int failures = 0;
};

struct CampaignSummary {
  std::vector<AlgorithmSummary> per_algorithm;
  std::vector<TrialRecord> records;
  bool any_failure = false;
  std::string records_path, summary_path;
};

/// Runs all trials (optionally across threads), writes records.csv, summary.txt
/// and one CDF file per algorithm under spec.out_dir.
CampaignSummary run_campaign(const CampaignSpec& spec);

/// records.csv schema: trial,seed,algorithm,min_se,sum_se,runtime_ms,
/// elim_iters,bisect_iters,max_rank_final,status
void write_csv(const std::vector<TrialRecord>& records, std::ostream& os);

/// Two-column (min-SE, cumulative probability) text files, one per algorithm.
/// Algorithms with no records are skipped with a warning on stderr.
std::vector<std::string> emit_plotdata(const std::vector<TrialRecord>& records,
                                       const std::string& out_dir);

}  // namespace mmfbeam::harness
