#include "mmfbeam/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace mmfbeam::metrics {

Eigen::VectorXd sinr(const ChannelSet& cs, const std::vector<Eigen::VectorXcd>& w,
                     double noise_power) {
  const int K = cs.num_ues();
  Eigen::VectorXd out(K);
  for (int k = 0; k < K; ++k) {
    const int g = cs.group_of_ue[static_cast<size_t>(k)];
    const auto& hk = cs.h[static_cast<size_t>(k)];
    double sig = 0.0, intf = 0.0;
    for (int j = 0; j < cs.num_groups; ++j) {
      const double p = std::norm(hk.dot(w[static_cast<size_t>(j)]));
      if (j == g)
        sig = p;
      else
        intf += p;
    }
    out(k) = sig / (intf + noise_power);
  }
  return out;
}

Eigen::VectorXd sinr_trace(const ChannelSet& cs,
                           const std::vector<Eigen::MatrixXcd>& W,
                           double noise_power) {
  const int K = cs.num_ues();
  Eigen::VectorXd out(K);
  for (int k = 0; k < K; ++k) {
    const int g = cs.group_of_ue[static_cast<size_t>(k)];
    const auto& hk = cs.h[static_cast<size_t>(k)];
    double sig = 0.0, intf = 0.0;
    for (int j = 0; j < cs.num_groups; ++j) {
      // tr(h h^H W) = h^H W h
      const double p = (hk.adjoint() * W[static_cast<size_t>(j)] * hk)(0).real();
      if (j == g)
        sig = p;
      else
        intf += p;
    }
    out(k) = sig / (intf + noise_power);
  }
  return out;
}

Eigen::VectorXd se(const Eigen::VectorXd& sinr_values) {
  return sinr_values.unaryExpr([](double s) { return std::log2(1.0 + s); });
}

double min_weighted_sinr(const Eigen::VectorXd& sinr_values,
                         const std::vector<double>& eta,
                         const std::vector<int>& group_of_ue) {
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < sinr_values.size(); ++k) {
    const double e = eta[static_cast<size_t>(group_of_ue[static_cast<size_t>(k)])];
    best = std::min(best, sinr_values(k) / e);
  }
  return best;
}

Eigen::VectorXd per_ap_power(const std::vector<Eigen::VectorXcd>& w, int num_aps,
                             int antennas_per_ap) {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(num_aps);
  for (const auto& wg : w)
    for (int l = 0; l < num_aps; ++l)
      p(l) += wg.segment(l * antennas_per_ap, antennas_per_ap).squaredNorm();
  return p;
}

Eigen::VectorXd per_ap_power_trace(const std::vector<Eigen::MatrixXcd>& W,
                                   int num_aps, int antennas_per_ap) {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(num_aps);
  for (const auto& Wg : W)
    for (int l = 0; l < num_aps; ++l)
      p(l) += Wg.block(l * antennas_per_ap, l * antennas_per_ap, antennas_per_ap,
                       antennas_per_ap)
                  .trace()
                  .real();
  return p;
}

std::vector<std::pair<double, double>> cdf(const std::vector<double>& samples) {
  if (samples.empty()) throw DomainError("cdf: empty sample set");
  std::vector<double> s = samples;
  std::sort(s.begin(), s.end());
  std::vector<std::pair<double, double>> out;
  out.reserve(s.size());
  const double n = static_cast<double>(s.size());
  for (size_t i = 0; i < s.size(); ++i)
    out.emplace_back(s[i], static_cast<double>(i + 1) / n);
  return out;
}

double percentile(std::vector<double> samples, double q) {
  if (samples.empty()) throw DomainError("percentile: empty sample set");
  if (q < 0.0 || q > 100.0) throw DomainError("percentile: q outside [0, 100]");
  std::sort(samples.begin(), samples.end());
  const double pos = q / 100.0 * static_cast<double>(samples.size() - 1);
  const size_t lo = static_cast<size_t>(std::floor(pos));
  const size_t hi = static_cast<size_t>(std::ceil(pos));
  const double frac = pos - static_cast<double>(lo);
  return samples[lo] + frac * (samples[hi] - samples[lo]);
}

TrialMetrics evaluate(const ChannelSet& cs, const std::vector<Eigen::VectorXcd>& w,
                      double noise_power) {
  TrialMetrics tm;
  tm.ue_sinr = sinr(cs, w, noise_power);
  tm.ue_se = se(tm.ue_sinr);
  tm.group_min_se.assign(static_cast<size_t>(cs.num_groups),
                         std::numeric_limits<double>::infinity());
  for (int k = 0; k < cs.num_ues(); ++k) {
    auto& gmin = tm.group_min_se[static_cast<size_t>(cs.group_of_ue[static_cast<size_t>(k)])];
    gmin = std::min(gmin, tm.ue_se(k));
  }
  tm.min_se = tm.ue_se.minCoeff();
  tm.sum_se = tm.ue_se.sum();
  tm.ap_power = per_ap_power(w, cs.num_aps, cs.antennas_per_ap);
  return tm;
}

}  // namespace mmfbeam::metrics
