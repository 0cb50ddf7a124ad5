#pragma once

#include <complex>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mmfbeam {

using cxd = std::complex<double>;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct PreconditionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct BisectionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SeaStalled : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

/// Seeded random stream. All simulator randomness flows through one of these;
/// substreams are derived with `derive` so parallel work stays reproducible.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform() { return unif_(gen_); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * unif_(gen_); }
  double gaussian() { return norm_(gen_); }
  /// Circularly-symmetric complex gaussian, unit variance: E|z|^2 = 1.
  cxd cgaussian() {
    static const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    return {gaussian() * inv_sqrt2, gaussian() * inv_sqrt2};
  }

  /// splitmix64 mix of (seed, salt); used to key independent substreams.
  static std::uint64_t mix(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
  std::uniform_real_distribution<double> unif_{0.0, 1.0};
  std::normal_distribution<double> norm_{0.0, 1.0};
};

/// Single source of truth for one simulated scenario.
struct ScenarioConfig {
  double area_side = 750.0;       // meters
  int num_aps = 4;                // L
  int antennas_per_ap = 2;        // N
  int num_groups = 2;             // G
  std::vector<int> group_sizes;   // K_g; empty means filled from ues_per_group
  double max_power_per_ap = 1.0;  // watts
  double noise_power = dbm_to_watt(-94.0);  // sigma^2, linear watts
  double bandwidth = 20e6;                  // Hz, metadata only
  double pathloss_const_db = -30.5;
  double pathloss_slope_db = 36.7;  // dB per decade of distance
  double shadow_std_db = 4.0;
  double shadow_decorr_m = 9.0;  // distance halving the shadow correlation
  double asd_deg = 15.0;         // angular standard deviation of local scattering
  double min_dist_m = 1.0;       // AP-UE distance floor
  std::vector<double> sinr_weights;  // eta_g in (0,1]; empty means all 1
  std::uint64_t rng_seed = 1;

  int total_ues() const {
    return std::accumulate(group_sizes.begin(), group_sizes.end(), 0);
  }
  double weight(int g) const {
    return sinr_weights.empty() ? 1.0 : sinr_weights.at(static_cast<size_t>(g));
  }
  std::vector<double> weights() const {
    std::vector<double> w(static_cast<size_t>(num_groups), 1.0);
    for (int g = 0; g < num_groups; ++g) w[static_cast<size_t>(g)] = weight(g);
    return w;
  }

  void validate() const;
};

struct NetworkGeometry {
  std::vector<Eigen::Vector2d> ap_positions;
  std::vector<Eigen::Vector2d> ue_positions;
  std::vector<int> group_of_ue;

  int num_aps() const { return static_cast<int>(ap_positions.size()); }
  int num_ues() const { return static_cast<int>(ue_positions.size()); }
};

struct LargeScaleFading {
  Eigen::MatrixXd beta;       // K x L linear channel gains
  Eigen::MatrixXd shadow_db;  // K x L shadow fading realizations, dB
  bool shadow_psd_repaired = false;
};

/// One fading realization: concatenated channels plus the correlation
/// matrices they were drawn from.
struct ChannelSet {
  int num_aps = 0;
  int antennas_per_ap = 0;
  int num_groups = 0;
  std::vector<int> group_of_ue;              // size K
  std::vector<Eigen::VectorXcd> h;           // per UE, length L*N
  std::vector<std::vector<Eigen::MatrixXcd>> spatial_corr;  // [ue][ap], N x N
  double noise_power = 1.0;

  int num_ues() const { return static_cast<int>(h.size()); }
  int dim() const { return num_aps * antennas_per_ap; }
  std::vector<std::vector<int>> ues_by_group() const {
    std::vector<std::vector<int>> out(static_cast<size_t>(num_groups));
    for (int k = 0; k < num_ues(); ++k)
      out[static_cast<size_t>(group_of_ue[static_cast<size_t>(k)])].push_back(k);
    return out;
  }
  /// Order-sensitive hash of the realization, for fairness logging.
  std::uint64_t fingerprint() const;
};

}  // namespace mmfbeam
