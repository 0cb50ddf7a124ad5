#pragma once

#include <vector>

#include <Eigen/Dense>

#include "mmfbeam/conic.hpp"
#include "mmfbeam/types.hpp"

namespace mmfbeam::heuristic {

struct HeuristicParams {
  int iters = -1;          // phase-alignment steps per group; -1 means S = K
  double emphasis = 1.1;   // per-step scaling of the worst UE's weight, >= 1
  // Interference-plus-noise regularizer: sigma^2 / P_max when true (the
  // algorithmic definition), plain sigma^2 otherwise.
  bool normalize_regularizer = true;
};

/// Unit-norm RZF precoders w_k = Z^-1 h_k / ||.||, Z = sum_i h_i h_i^H + (s^2/P) I.
std::vector<Eigen::VectorXcd> rzf_unicast(const ChannelSet& cs, double p_max,
                                          double noise_power);

struct UnicastResult {
  std::vector<Eigen::VectorXcd> w_unit;  // unit-norm per-UE precoders
  Eigen::VectorXd rho;                   // optimal max-min powers
  double target = 0.0;                   // achieved min SINR
  Eigen::VectorXd ue_sinr;
  Eigen::VectorXd ap_power;
  int solves = 0;
};

/// Max-min unicast power allocation under per-AP budgets: bisection on the
/// common SINR target with an LP feasibility subproblem in the powers. The
/// returned powers leave at least one AP budget tight.
UnicastResult unicast_maxmin_power(const ChannelSet& cs,
                                   const std::vector<Eigen::VectorXcd>& w_unit,
                                   double p_max, double eps,
                                   const conic::SolverOptions& opts = {});

struct PhaseStep {
  int group;
  int k_min;
  double theta;
  cxd aligned_term;  // updated diagonal entry of R_g
  cxd rest_sum;      // row sum minus the diagonal entry, unchanged by the update
};

struct PhaseAlignResult {
  std::vector<Eigen::VectorXcd> w;  // final group precoders, power-tight
  double alpha = 0.0;               // common power scaling factor
  std::vector<Eigen::VectorXcd> rho_rt;  // final complex group weights
  std::vector<PhaseStep> steps;
};

/// Phase alignment and UE emphasis: per group, iteratively rotate and amplify
/// the weakest UE's effective-channel weight, then beamform through the
/// inter-group interference inverse and scale all groups to the binding AP.
PhaseAlignResult phase_align(const ChannelSet& cs, const HeuristicParams& params,
                             const UnicastResult& unicast, double p_max,
                             double noise_power);

}  // namespace mmfbeam::heuristic
