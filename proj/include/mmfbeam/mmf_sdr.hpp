#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "mmfbeam/conic.hpp"
#include "mmfbeam/types.hpp"

namespace mmfbeam::mmf {

struct Penalty {
  int group = 0;
  Eigen::VectorXcd direction;  // unit norm
  double weight = 0.0;
};

/// One QoS problem: meet weighted SINR target gamma for every UE while
/// minimizing the normalized worst per-AP power (plus penalty terms).
struct QoSInstance {
  const ChannelSet* channels = nullptr;
  std::vector<double> eta;   // per group, in (0,1]
  double gamma = 0.0;        // SINR target
  Eigen::VectorXd p_max;     // per-AP budgets, length L
  std::vector<Penalty> penalties;

  void validate() const;
};

conic::ConicProblem build_qos_sdp(const QoSInstance& inst);

struct QoSResult {
  conic::SolveStatus status = conic::SolveStatus::MaxIter;
  double x = std::numeric_limits<double>::quiet_NaN();  // normalized max AP power
  std::vector<Eigen::MatrixXcd> W;
  int iterations = 0;
};

QoSResult solve_qos(const QoSInstance& inst, const conic::SolverOptions& opts = {});

struct BisectStep {
  double gamma_lo, gamma_up, gamma_mid;
  double x;  // NaN when not solved to optimality
  conic::SolveStatus status;
};

struct BisectResult {
  double gamma_star = 0.0;          // largest midpoint that was power-feasible
  double x_at_star = std::numeric_limits<double>::quiet_NaN();
  std::vector<Eigen::MatrixXcd> W;  // solution at gamma_star
  std::vector<BisectStep> trace;
  bool found_feasible = false;
  int solver_iterations = 0;
};

/// Upper bound for the SINR bisection: min_kg P_T ||h_kg||^2 / (eta_g sigma^2).
double bisection_upper_bound(const ChannelSet& cs, const std::vector<double>& eta,
                             const Eigen::VectorXd& p_max);

/// Bisection over the SINR target; a midpoint counts as feasible when the QoS
/// solve is optimal with x <= 1. Infeasible and MaxIter midpoints shrink the
/// interval from above. gamma_up < 0 selects the default upper bound.
BisectResult bisect_mmf(const ChannelSet& cs, const std::vector<double>& eta,
                        const Eigen::VectorXd& p_max, double eps,
                        const std::vector<Penalty>& penalties = {},
                        const conic::SolverOptions& opts = {}, double gamma_lo = 0.0,
                        double gamma_up = -1.0);

struct MmfOptions {
  double eps = 0.1;        // bisection tolerance on the SINR target
  double kappa = 0.96;     // elimination interval shrink factor
  double zeta = 30.0;      // penalty weight
  double tol_rank = 1e-4;  // eigenvalue ratio deciding numerical rank
  int max_elim = 50;
  int n_candidates = 300;
  conic::SolverOptions solver;
};

struct MMFResult {
  std::vector<Eigen::MatrixXcd> W;  // matrix precoders (when produced)
  std::vector<Eigen::VectorXcd> w;  // vector precoders (rank-1 stages)
  double t_star = 0.0;              // achieved min weighted SINR target
  double min_se = 0.0;
  double sum_se = 0.0;
  std::vector<double> group_min_se;
  Eigen::VectorXd ap_power;
  std::vector<std::vector<int>> rank_history;  // per elimination iteration
  std::vector<BisectStep> bisect_trace;
  int elim_iters = 0;
  int bisect_iters = 0;
  int max_rank_final = 0;
  double runtime_ms = 0.0;
  std::string status = "ok";
};

/// Successive elimination: bisect, then penalize second eigenvectors of
/// higher-rank blocks until every group is rank-1. The factorized directions
/// get the same max-min power polish as the rank-1 baselines, which leaves
/// the most loaded AP exactly at budget.
/// `first_stage` optionally reuses an existing penalty-free bisection.
MMFResult sea(const ChannelSet& cs, const std::vector<double>& eta,
              const Eigen::VectorXd& p_max, const MmfOptions& opts = {},
              const BisectResult* first_stage = nullptr);

/// Dominant-eigenvector rounding of a relaxed solution plus MMPC power control.
MMFResult sdr_dominant(const std::vector<Eigen::MatrixXcd>& relaxed_W,
                       const ChannelSet& cs, const std::vector<double>& eta,
                       const Eigen::VectorXd& p_max, const MmfOptions& opts = {});

/// Gaussian randomization: n_candidates draws w_g = W_g^(1/2) z plus the
/// dominant-eigenvector candidate; each is power-controlled, best one wins.
MMFResult sdr_randomize(const std::vector<Eigen::MatrixXcd>& relaxed_W,
                        const ChannelSet& cs, const std::vector<double>& eta,
                        const Eigen::VectorXd& p_max, int n_candidates, Rng& rng,
                        const MmfOptions& opts = {});

struct MmpcResult {
  Eigen::VectorXd p;      // per-group powers
  double target = 0.0;    // achieved min weighted SINR
  Eigen::VectorXd ap_power;
  int solves = 0;
};

/// Max-min power control over fixed beam directions: bisection on the target
/// with an LP feasibility subproblem in the powers.
MmpcResult mmpc_power_control(const std::vector<Eigen::VectorXcd>& directions,
                              const ChannelSet& cs, const std::vector<double>& eta,
                              const Eigen::VectorXd& p_max, double eps,
                              const conic::SolverOptions& opts = {});

}  // namespace mmfbeam::mmf
