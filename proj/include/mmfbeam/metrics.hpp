#pragma once

#include <vector>

#include <Eigen/Dense>

#include "mmfbeam/types.hpp"

namespace mmfbeam::metrics {

/// Per-UE SINR under vector precoders {w_g}.
Eigen::VectorXd sinr(const ChannelSet& cs, const std::vector<Eigen::VectorXcd>& w,
                     double noise_power);

/// Per-UE SINR in the trace form over matrix precoders {W_g}.
Eigen::VectorXd sinr_trace(const ChannelSet& cs,
                           const std::vector<Eigen::MatrixXcd>& W,
                           double noise_power);

inline double se(double sinr_value) { return std::log2(1.0 + sinr_value); }
Eigen::VectorXd se(const Eigen::VectorXd& sinr_values);

/// min over UEs of SINR_kg / eta_g.
double min_weighted_sinr(const Eigen::VectorXd& sinr_values,
                         const std::vector<double>& eta,
                         const std::vector<int>& group_of_ue);

/// Per-AP transmit power sum_g ||w_{g,l}||^2.
Eigen::VectorXd per_ap_power(const std::vector<Eigen::VectorXcd>& w, int num_aps,
                             int antennas_per_ap);
Eigen::VectorXd per_ap_power_trace(const std::vector<Eigen::MatrixXcd>& W,
                                   int num_aps, int antennas_per_ap);

/// Sorted empirical CDF points (value, i/n).
std::vector<std::pair<double, double>> cdf(const std::vector<double>& samples);

/// Percentile by linear interpolation of order statistics, q in [0, 100].
double percentile(std::vector<double> samples, double q);

struct TrialMetrics {
  Eigen::VectorXd ue_sinr;
  Eigen::VectorXd ue_se;
  std::vector<double> group_min_se;
  double min_se = 0.0;
  double sum_se = 0.0;
  Eigen::VectorXd ap_power;
};

TrialMetrics evaluate(const ChannelSet& cs, const std::vector<Eigen::VectorXcd>& w,
                      double noise_power);

}  // namespace mmfbeam::metrics
