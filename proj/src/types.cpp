#include "mmfbeam/types.hpp"

namespace mmfbeam {

void ScenarioConfig::validate() const {
  if (num_aps < 1 || antennas_per_ap < 1 || num_groups < 1)
    throw ConfigError("scenario: L, N, G must all be >= 1");
  if (group_sizes.size() != static_cast<size_t>(num_groups))
    throw ConfigError("scenario: group_sizes must list exactly G entries");
  for (int kg : group_sizes)
    if (kg < 1) throw ConfigError("scenario: every group needs at least one UE");
  if (!(area_side > 0.0)) throw ConfigError("scenario: area_side must be positive");
  if (!(max_power_per_ap > 0.0)) throw ConfigError("scenario: power must be positive");
  if (!(noise_power > 0.0)) throw ConfigError("scenario: noise power must be positive");
  if (!sinr_weights.empty()) {
    if (sinr_weights.size() != static_cast<size_t>(num_groups))
      throw ConfigError("scenario: sinr_weights must list exactly G entries");
    for (double w : sinr_weights)
      if (!(w > 0.0 && w <= 1.0)) throw ConfigError("scenario: weights must be in (0,1]");
  }
}

std::uint64_t ChannelSet::fingerprint() const {
  // FNV-1a over the raw channel coefficients
  std::uint64_t h64 = 1469598103934665603ULL;
  auto eat = [&h64](double v) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(v));
    std::memcpy(&bits, &v, sizeof(bits));
    for (int i = 0; i < 8; ++i) {
      h64 ^= (bits >> (8 * i)) & 0xffULL;
      h64 *= 1099511628211ULL;
    }
  };
  for (const auto& hk : h)
    for (Eigen::Index i = 0; i < hk.size(); ++i) {
      eat(hk(i).real());
      eat(hk(i).imag());
    }
  return h64;
}

}  // namespace mmfbeam
