#pragma once

#include <Eigen/Dense>

#include "mmfbeam/types.hpp"

namespace mmfbeam::channel {

/// APs at the centers of a sqrt(L) x sqrt(L) grid tiling the area; UEs
/// uniform i.i.d.; groups assigned round-robin by the configured sizes.
/// Throws ConfigError when L is not a perfect square.
NetworkGeometry place_network(const ScenarioConfig& cfg, Rng& rng);

/// Toroidal distance: minimum over the 9 wrap-around images.
double wrap_distance(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                     double area_side);

/// Urban-microcell large-scale gain in dB at distance d (meters) plus shadow
/// term. Throws DomainError for d <= 0.
double pathloss_db(double d_m, double shadow_db, double const_db = -30.5,
                   double slope_db = 36.7);

struct ShadowCovariance {
  Eigen::MatrixXd cov;  // K x K, identical for every AP; cross-AP cov is zero
  bool repaired = false;  // eigenvalue clipping was needed
};

ShadowCovariance shadow_covariance(const NetworkGeometry& geom, double area_side,
                                   double std_db = 4.0, double decorr_m = 9.0);

/// Shadow realizations (independent across APs) and the resulting linear gains.
LargeScaleFading sample_large_scale(const ScenarioConfig& cfg,
                                    const NetworkGeometry& geom, Rng& rng);

/// Gaussian local scattering correlation for a half-wavelength ULA:
/// C_mn = exp(j pi (m-n) sin phi) exp(-(asd_rad pi (m-n) cos phi)^2 / 2).
/// Unit diagonal, Hermitian PSD.
Eigen::MatrixXcd local_scattering(int n_antennas, double phi_rad, double asd_rad);

/// Per-(UE, AP) spatial correlation R = beta * C(bearing), with the bearing
/// taken toward the wrapped image at minimal distance.
std::vector<std::vector<Eigen::MatrixXcd>> build_spatial_correlation(
    const NetworkGeometry& geom, const ScenarioConfig& cfg,
    const Eigen::MatrixXd& beta);

/// Correlated Rayleigh draw h_l = R_l^(1/2) z, blocks concatenated in AP order.
ChannelSet sample_channels(const ScenarioConfig& cfg, const NetworkGeometry& geom,
                           const LargeScaleFading& ls,
                           const std::vector<std::vector<Eigen::MatrixXcd>>& R,
                           Rng& rng);

/// Full pipeline for one realization: placement, large-scale, correlation, draw.
ChannelSet generate(const ScenarioConfig& cfg, Rng& rng);

}  // namespace mmfbeam::channel
