#include "mmfbeam/channel.hpp"

#include <cmath>

#include "mmfbeam/linalg.hpp"

namespace mmfbeam::channel {

namespace {

// signed coordinate difference b - a on the wrapped axis, smallest magnitude
double wrap_delta(double a, double b, double side) {
  double d = b - a;
  if (d > 0.5 * side) d -= side;
  if (d < -0.5 * side) d += side;
  return d;
}

}  // namespace

NetworkGeometry place_network(const ScenarioConfig& cfg, Rng& rng) {
  cfg.validate();
  const int L = cfg.num_aps;
  const int side_count = static_cast<int>(std::llround(std::sqrt(static_cast<double>(L))));
  if (side_count * side_count != L)
    throw ConfigError("place_network: number of APs must be a perfect square");

  NetworkGeometry geom;
  const double cell = cfg.area_side / side_count;
  geom.ap_positions.reserve(static_cast<size_t>(L));
  for (int iy = 0; iy < side_count; ++iy)
    for (int ix = 0; ix < side_count; ++ix)
      geom.ap_positions.emplace_back(cell * (ix + 0.5), cell * (iy + 0.5));

  const int K = cfg.total_ues();
  geom.ue_positions.reserve(static_cast<size_t>(K));
  for (int k = 0; k < K; ++k)
    geom.ue_positions.emplace_back(rng.uniform(0.0, cfg.area_side),
                                   rng.uniform(0.0, cfg.area_side));

  geom.group_of_ue.reserve(static_cast<size_t>(K));
  for (int g = 0; g < cfg.num_groups; ++g)
    for (int i = 0; i < cfg.group_sizes[static_cast<size_t>(g)]; ++i)
      geom.group_of_ue.push_back(g);
  return geom;
}

double wrap_distance(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                     double area_side) {
  const double dx = wrap_delta(a.x(), b.x(), area_side);
  const double dy = wrap_delta(a.y(), b.y(), area_side);
  return std::hypot(dx, dy);
}

double pathloss_db(double d_m, double shadow_db, double const_db, double slope_db) {
  if (!(d_m > 0.0)) throw DomainError("pathloss_db: distance must be positive");
  return const_db - slope_db * std::log10(d_m) + shadow_db;
}

ShadowCovariance shadow_covariance(const NetworkGeometry& geom, double area_side,
                                   double std_db, double decorr_m) {
  const int K = geom.num_ues();
  const double var = std_db * std_db;
  ShadowCovariance out;
  out.cov.resize(K, K);
  for (int k = 0; k < K; ++k) {
    out.cov(k, k) = var;
    for (int i = k + 1; i < K; ++i) {
      const double delta =
          wrap_distance(geom.ue_positions[static_cast<size_t>(k)],
                        geom.ue_positions[static_cast<size_t>(i)], area_side);
      const double c = var * std::pow(2.0, -delta / decorr_m);
      out.cov(k, i) = c;
      out.cov(i, k) = c;
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(out.cov);
  if (llt.info() != Eigen::Success) {
    // nearest-PSD repair: clip negative eigenvalues at zero
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(out.cov);
    out.cov = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).asDiagonal() *
              es.eigenvectors().transpose();
    out.repaired = true;
  }
  return out;
}

LargeScaleFading sample_large_scale(const ScenarioConfig& cfg,
                                    const NetworkGeometry& geom, Rng& rng) {
  const int K = geom.num_ues();
  const int L = geom.num_aps();
  LargeScaleFading ls;
  ls.shadow_db.resize(K, L);
  ls.beta.resize(K, L);

  const ShadowCovariance sc =
      shadow_covariance(geom, cfg.area_side, cfg.shadow_std_db, cfg.shadow_decorr_m);
  ls.shadow_psd_repaired = sc.repaired;
  Eigen::MatrixXd chol;
  {
    Eigen::LLT<Eigen::MatrixXd> llt(sc.cov);
    if (llt.info() == Eigen::Success) {
      chol = llt.matrixL();
    } else {
      Eigen::LLT<Eigen::MatrixXd> llt2(
          sc.cov + 1e-10 * cfg.shadow_std_db * cfg.shadow_std_db *
                       Eigen::MatrixXd::Identity(K, K));
      chol = llt2.matrixL();
    }
  }

  // shadows independent across APs, correlated across UEs within an AP
  for (int l = 0; l < L; ++l) {
    Eigen::VectorXd z(K);
    for (int k = 0; k < K; ++k) z(k) = rng.gaussian();
    ls.shadow_db.col(l) = chol * z;
  }
  for (int k = 0; k < K; ++k)
    for (int l = 0; l < L; ++l) {
      const double d = std::max(
          wrap_distance(geom.ue_positions[static_cast<size_t>(k)],
                        geom.ap_positions[static_cast<size_t>(l)], cfg.area_side),
          cfg.min_dist_m);
      ls.beta(k, l) = db_to_linear(pathloss_db(d, ls.shadow_db(k, l),
                                               cfg.pathloss_const_db,
                                               cfg.pathloss_slope_db));
    }
  return ls;
}

Eigen::MatrixXcd local_scattering(int n_antennas, double phi_rad, double asd_rad) {
  Eigen::MatrixXcd C(n_antennas, n_antennas);
  const double s = std::sin(phi_rad);
  const double c = std::cos(phi_rad);
  for (int mm = 0; mm < n_antennas; ++mm)
    for (int nn = 0; nn < n_antennas; ++nn) {
      const double k = M_PI * (mm - nn);
      const double damp = std::exp(-0.5 * (asd_rad * k * c) * (asd_rad * k * c));
      C(mm, nn) = std::polar(damp, k * s);
    }
  return C;
}

std::vector<std::vector<Eigen::MatrixXcd>> build_spatial_correlation(
    const NetworkGeometry& geom, const ScenarioConfig& cfg,
    const Eigen::MatrixXd& beta) {
  const int K = geom.num_ues();
  const int L = geom.num_aps();
  const int N = cfg.antennas_per_ap;
  const double asd = cfg.asd_deg * M_PI / 180.0;
  std::vector<std::vector<Eigen::MatrixXcd>> R(
      static_cast<size_t>(K), std::vector<Eigen::MatrixXcd>(static_cast<size_t>(L)));
  for (int k = 0; k < K; ++k)
    for (int l = 0; l < L; ++l) {
      const auto& pu = geom.ue_positions[static_cast<size_t>(k)];
      const auto& pa = geom.ap_positions[static_cast<size_t>(l)];
      // bearing toward the wrapped image achieving the minimal distance
      const double dx = wrap_delta(pa.x(), pu.x(), cfg.area_side);
      const double dy = wrap_delta(pa.y(), pu.y(), cfg.area_side);
      const double phi = std::atan2(dy, dx);
      R[static_cast<size_t>(k)][static_cast<size_t>(l)] =
          beta(k, l) * local_scattering(N, phi, asd);
    }
  return R;
}

ChannelSet sample_channels(const ScenarioConfig& cfg, const NetworkGeometry& geom,
                           const LargeScaleFading& ls,
                           const std::vector<std::vector<Eigen::MatrixXcd>>& R,
                           Rng& rng) {
  (void)ls;
  const int K = geom.num_ues();
  const int L = geom.num_aps();
  const int N = cfg.antennas_per_ap;
  ChannelSet cs;
  cs.num_aps = L;
  cs.antennas_per_ap = N;
  cs.num_groups = cfg.num_groups;
  cs.group_of_ue = geom.group_of_ue;
  cs.noise_power = cfg.noise_power;
  cs.spatial_corr = R;
  cs.h.resize(static_cast<size_t>(K));
  for (int k = 0; k < K; ++k) {
    Eigen::VectorXcd hk(L * N);
    for (int l = 0; l < L; ++l) {
      const Eigen::MatrixXcd root =
          conic::hermitian_sqrt(R[static_cast<size_t>(k)][static_cast<size_t>(l)]);
      Eigen::VectorXcd z(N);
      for (int n = 0; n < N; ++n) z(n) = rng.cgaussian();
      hk.segment(l * N, N) = root * z;
    }
    cs.h[static_cast<size_t>(k)] = hk;
  }
  return cs;
}

ChannelSet generate(const ScenarioConfig& cfg, Rng& rng) {
  const NetworkGeometry geom = place_network(cfg, rng);
  const LargeScaleFading ls = sample_large_scale(cfg, geom, rng);
  const auto R = build_spatial_correlation(geom, cfg, ls.beta);
  return sample_channels(cfg, geom, ls, R, rng);
}

}  // namespace mmfbeam::channel
