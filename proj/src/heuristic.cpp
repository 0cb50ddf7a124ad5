#include "mmfbeam/heuristic.hpp"

#include <cmath>

#include "mmfbeam/metrics.hpp"

namespace mmfbeam::heuristic {

using conic::ConicProblem;
using conic::Sense;
using conic::SolveStatus;

std::vector<Eigen::VectorXcd> rzf_unicast(const ChannelSet& cs, double p_max,
                                          double noise_power) {
  if (cs.num_ues() < 1) throw DomainError("rzf_unicast: no channels");
  const int dim = cs.dim();
  Eigen::MatrixXcd Z = (noise_power / p_max) * Eigen::MatrixXcd::Identity(dim, dim);
  for (const auto& hk : cs.h) Z += hk * hk.adjoint();
  const Eigen::LLT<Eigen::MatrixXcd> llt(Z);
  std::vector<Eigen::VectorXcd> w;
  w.reserve(cs.h.size());
  for (const auto& hk : cs.h) {
    Eigen::VectorXcd wk = llt.solve(hk);
    w.push_back(wk / wk.norm());
  }
  return w;
}

UnicastResult unicast_maxmin_power(const ChannelSet& cs,
                                   const std::vector<Eigen::VectorXcd>& w_unit,
                                   double p_max, double eps,
                                   const conic::SolverOptions& opts) {
  const int K = cs.num_ues();
  const int L = cs.num_aps;
  const int N = cs.antennas_per_ap;
  if (static_cast<int>(w_unit.size()) != K)
    throw DomainError("unicast_maxmin_power: one precoder per UE required");
  if (!(eps > 0.0)) throw DomainError("unicast_maxmin_power: eps must be positive");

  // cross gains normalized by the noise power
  Eigen::MatrixXd gain(K, K);
  for (int k = 0; k < K; ++k)
    for (int i = 0; i < K; ++i)
      gain(k, i) = std::norm(cs.h[static_cast<size_t>(k)].dot(
                       w_unit[static_cast<size_t>(i)])) /
                   cs.noise_power;
  Eigen::MatrixXd ap_coef(K, L);
  for (int i = 0; i < K; ++i)
    for (int l = 0; l < L; ++l)
      ap_coef(i, l) = w_unit[static_cast<size_t>(i)].segment(l * N, N).squaredNorm();

  auto solve_at = [&](double t) {
    ConicProblem p;
    p.num_scalars = K + 1;  // powers then x
    p.objective_scalars = {{K, 1.0}};
    for (int k = 0; k < K; ++k) {
      ConicProblem::Constraint c;
      c.sense = Sense::GE;
      c.rhs = t;
      for (int i = 0; i < K; ++i)
        c.scalars.emplace_back(i, i == k ? gain(k, k) : -t * gain(k, i));
      p.constraints.push_back(std::move(c));
    }
    for (int l = 0; l < L; ++l) {
      ConicProblem::Constraint c;
      c.sense = Sense::LE;
      c.rhs = 0.0;
      for (int i = 0; i < K; ++i) c.scalars.emplace_back(i, ap_coef(i, l));
      c.scalars.emplace_back(K, -p_max);
      p.constraints.push_back(std::move(c));
    }
    return conic::solve_conic(p, opts);
  };

  double t_lo = 0.0;
  double pt = p_max * L;
  double t_up = std::numeric_limits<double>::infinity();
  for (int k = 0; k < K; ++k)
    t_up = std::min(t_up, pt * cs.h[static_cast<size_t>(k)].squaredNorm() /
                              cs.noise_power);

  UnicastResult res;
  res.w_unit = w_unit;
  res.rho = Eigen::VectorXd::Zero(K);
  double x_best = 0.0;
  while (t_up - t_lo >= eps) {
    const double mid = 0.5 * (t_lo + t_up);
    const conic::ConicSolution sol = solve_at(mid);
    ++res.solves;
    if (sol.status == SolveStatus::Optimal && sol.scalars(K) <= 1.0) {
      t_lo = mid;
      res.rho = sol.scalars.head(K);
      x_best = sol.scalars(K);
    } else {
      t_up = mid;
    }
  }
  if (x_best > 1e-12) res.rho /= x_best;
  res.rho = res.rho.cwiseMax(0.0);
  res.ap_power = ap_coef.transpose() * res.rho;

  res.ue_sinr.resize(K);
  for (int k = 0; k < K; ++k) {
    double intf = 0.0;
    for (int i = 0; i < K; ++i)
      if (i != k) intf += res.rho(i) * gain(k, i);
    res.ue_sinr(k) = res.rho(k) * gain(k, k) / (intf + 1.0);
  }
  res.target = K > 0 ? res.ue_sinr.minCoeff() : 0.0;
  return res;
}

PhaseAlignResult phase_align(const ChannelSet& cs, const HeuristicParams& params,
                             const UnicastResult& unicast, double p_max,
                             double noise_power) {
  const int G = cs.num_groups;
  const int L = cs.num_aps;
  const int N = cs.antennas_per_ap;
  const int dim = cs.dim();
  const int K = cs.num_ues();
  if (params.emphasis < 1.0) throw DomainError("phase_align: emphasis must be >= 1");
  const int S = params.iters < 0 ? K : params.iters;
  const double reg = params.normalize_regularizer ? noise_power / p_max : noise_power;

  const auto groups = cs.ues_by_group();
  PhaseAlignResult res;
  res.w.resize(static_cast<size_t>(G));
  res.rho_rt.resize(static_cast<size_t>(G));

  for (int g = 0; g < G; ++g) {
    const auto& members = groups[static_cast<size_t>(g)];
    const int Kg = static_cast<int>(members.size());

    Eigen::MatrixXcd Rint = reg * Eigen::MatrixXcd::Identity(dim, dim);
    for (int j = 0; j < G; ++j) {
      if (j == g) continue;
      for (int k : groups[static_cast<size_t>(j)])
        Rint += cs.h[static_cast<size_t>(k)] * cs.h[static_cast<size_t>(k)].adjoint();
    }
    const Eigen::LLT<Eigen::MatrixXcd> llt(Rint);

    Eigen::MatrixXcd Hg(dim, Kg);
    for (int c = 0; c < Kg; ++c) Hg.col(c) = cs.h[static_cast<size_t>(members[static_cast<size_t>(c)])];
    const Eigen::MatrixXcd Hbar = llt.solve(Hg);
    Eigen::MatrixXcd Htil = Hbar;
    for (int c = 0; c < Kg; ++c) Htil.col(c) /= Htil.col(c).norm();

    Eigen::VectorXcd rho(Kg);
    for (int c = 0; c < Kg; ++c)
      rho(c) = std::sqrt(std::max(
          unicast.rho(members[static_cast<size_t>(c)]), 0.0));

    const Eigen::MatrixXcd Rbase = Hbar.adjoint() * Htil;  // R_g = Rbase diag(rho)
    Eigen::MatrixXcd Rg = Rbase * rho.asDiagonal();

    for (int it = 0; it < S; ++it) {
      const Eigen::VectorXcd ds = Rg.rowwise().sum();
      int k_min = 0;
      for (int k = 1; k < Kg; ++k) {
        const double a = std::abs(ds(k)), b = std::abs(ds(k_min));
        if (a < b || (a == b && ds(k).real() < ds(k_min).real())) k_min = k;
      }
      const cxd ue_min = Rg(k_min, k_min);
      const cxd rest = ds(k_min) - ue_min;
      const double theta = std::arg(rest) - std::arg(ue_min);
      rho(k_min) *= params.emphasis * std::polar(1.0, theta);
      Rg.col(k_min) = Rbase.col(k_min) * rho(k_min);
      res.steps.push_back({g, k_min, theta, Rg(k_min, k_min), rest});
    }

    const Eigen::VectorXcd d = Htil * rho;
    const Eigen::VectorXcd wbar = llt.solve(d);
    res.w[static_cast<size_t>(g)] = wbar / wbar.norm();
    res.rho_rt[static_cast<size_t>(g)] = rho;
  }

  // equal total power allocation: one scale, binding AP exactly at budget
  const Eigen::VectorXd load = metrics::per_ap_power(res.w, L, N);
  const double worst = load.maxCoeff();
  res.alpha = worst > 0.0 ? p_max / worst : 0.0;
  const double root = std::sqrt(res.alpha);
  for (auto& wg : res.w) wg *= root;
  return res;
}

}  // namespace mmfbeam::heuristic
