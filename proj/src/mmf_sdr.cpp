#include "mmfbeam/mmf_sdr.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "mmfbeam/linalg.hpp"
#include "mmfbeam/metrics.hpp"

namespace mmfbeam::mmf {

namespace {

using conic::ConicProblem;
using conic::HermitianMatrix;
using conic::Sense;
using conic::SolveStatus;

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
      .count();
}

/// Channels scaled so the per-UE noise is 1; the QoS feasible set and the
/// optimal (x, W) are unchanged.
ChannelSet noise_normalized(const ChannelSet& cs) {
  ChannelSet out = cs;
  const double s = std::sqrt(cs.noise_power);
  for (auto& hk : out.h) hk /= s;
  out.noise_power = 1.0;
  return out;
}

std::vector<Eigen::VectorXcd> factorized(const std::vector<Eigen::MatrixXcd>& W) {
  std::vector<Eigen::VectorXcd> w;
  w.reserve(W.size());
  for (const auto& Wg : W) w.push_back(conic::dominant_component(Wg));
  return w;
}

/// Common scale making the most loaded AP exactly meet its budget. Scaling all
/// groups together can only raise every SINR, so the bisected target is kept.
void tighten_power(std::vector<Eigen::VectorXcd>& w, const Eigen::VectorXd& p_max,
                   int num_aps, int antennas_per_ap) {
  const Eigen::VectorXd load = metrics::per_ap_power(w, num_aps, antennas_per_ap);
  double worst = 0.0;
  for (int l = 0; l < num_aps; ++l) worst = std::max(worst, load(l) / p_max(l));
  if (worst <= 0.0) return;
  const double c = 1.0 / std::sqrt(worst);
  for (auto& wg : w) wg *= c;
}

void fill_metrics(MMFResult& res, const ChannelSet& cs) {
  const metrics::TrialMetrics tm = metrics::evaluate(cs, res.w, cs.noise_power);
  res.min_se = tm.min_se;
  res.sum_se = tm.sum_se;
  res.group_min_se = tm.group_min_se;
  res.ap_power = tm.ap_power;
}

std::vector<int> block_ranks(const std::vector<Eigen::MatrixXcd>& W, double tol_rank) {
  std::vector<int> r;
  r.reserve(W.size());
  for (const auto& Wg : W) r.push_back(conic::numerical_rank(Wg, tol_rank));
  return r;
}

}  // namespace

void QoSInstance::validate() const {
  if (channels == nullptr) throw DomainError("QoSInstance: missing channels");
  if (gamma < 0.0) throw DomainError("QoSInstance: negative SINR target");
  if (static_cast<int>(eta.size()) != channels->num_groups)
    throw DomainError("QoSInstance: eta size mismatch");
  for (double e : eta)
    if (!(e > 0.0 && e <= 1.0)) throw DomainError("QoSInstance: eta outside (0,1]");
  if (p_max.size() != channels->num_aps)
    throw DomainError("QoSInstance: p_max size mismatch");
  for (const auto& pen : penalties) {
    if (pen.group < 0 || pen.group >= channels->num_groups)
      throw DomainError("QoSInstance: penalty group out of range");
    if (std::abs(pen.direction.norm() - 1.0) > 1e-6)
      throw DomainError("QoSInstance: penalty direction must be unit norm");
    if (pen.weight < 0.0) throw DomainError("QoSInstance: negative penalty weight");
  }
}

ConicProblem build_qos_sdp(const QoSInstance& inst) {
  inst.validate();
  const ChannelSet& cs = *inst.channels;
  const int G = cs.num_groups;
  const int L = cs.num_aps;
  const int N = cs.antennas_per_ap;
  const int dim = L * N;

  ConicProblem p;
  p.psd_dims.assign(static_cast<size_t>(G), dim);
  p.num_scalars = 1;  // x
  p.objective_scalars = {{0, 1.0}};

  // SINR rows: tr(H_kg W_g) - eta_g gamma sum_{j!=g} tr(H_kg W_j) >= eta_g gamma sigma^2
  for (int k = 0; k < cs.num_ues(); ++k) {
    const int g = cs.group_of_ue[static_cast<size_t>(k)];
    const Eigen::MatrixXcd H = cs.h[static_cast<size_t>(k)] *
                               cs.h[static_cast<size_t>(k)].adjoint();
    const double coef = inst.eta[static_cast<size_t>(g)] * inst.gamma;
    ConicProblem::Constraint c;
    c.sense = Sense::GE;
    c.rhs = coef * cs.noise_power;
    for (int j = 0; j < G; ++j)
      c.blocks.emplace_back(j, HermitianMatrix(j == g ? H : (-coef * H).eval()));
    p.constraints.push_back(std::move(c));
  }

  // per-AP rows: sum_g [tr(D_l W_g) + zeta sum_i u^H W_g u] <= P_lmax x;
  // the penalty sum enters every AP's row identically
  std::vector<Eigen::MatrixXcd> penalty_mat(
      static_cast<size_t>(G), Eigen::MatrixXcd::Zero(dim, dim));
  for (const auto& pen : inst.penalties)
    penalty_mat[static_cast<size_t>(pen.group)] +=
        pen.weight * (pen.direction * pen.direction.adjoint());

  for (int l = 0; l < L; ++l) {
    ConicProblem::Constraint c;
    c.sense = Sense::LE;
    c.rhs = 0.0;
    for (int g = 0; g < G; ++g) {
      Eigen::MatrixXcd Dl = Eigen::MatrixXcd::Zero(dim, dim);
      Dl.block(l * N, l * N, N, N).setIdentity();
      c.blocks.emplace_back(g, HermitianMatrix(Dl + penalty_mat[static_cast<size_t>(g)]));
    }
    c.scalars.emplace_back(0, -inst.p_max(l));
    p.constraints.push_back(std::move(c));
  }
  return p;
}

QoSResult solve_qos(const QoSInstance& inst, const conic::SolverOptions& opts) {
  inst.validate();
  const ChannelSet scaled = noise_normalized(*inst.channels);
  QoSInstance si = inst;
  si.channels = &scaled;
  const ConicProblem prob = build_qos_sdp(si);
  const conic::ConicSolution sol = conic::solve_conic(prob, opts);

  QoSResult res;
  res.status = sol.status;
  res.iterations = sol.iterations;
  if (sol.status == SolveStatus::Optimal) {
    res.x = sol.scalars(0);
    res.W = sol.blocks;
  }
  return res;
}

double bisection_upper_bound(const ChannelSet& cs, const std::vector<double>& eta,
                             const Eigen::VectorXd& p_max) {
  const double pt = p_max.sum();
  double bound = std::numeric_limits<double>::infinity();
  for (int k = 0; k < cs.num_ues(); ++k) {
    const double e = eta[static_cast<size_t>(cs.group_of_ue[static_cast<size_t>(k)])];
    bound = std::min(bound, pt * cs.h[static_cast<size_t>(k)].squaredNorm() /
                                (e * cs.noise_power));
  }
  return bound;
}

BisectResult bisect_mmf(const ChannelSet& cs, const std::vector<double>& eta,
                        const Eigen::VectorXd& p_max, double eps,
                        const std::vector<Penalty>& penalties,
                        const conic::SolverOptions& opts, double gamma_lo,
                        double gamma_up) {
  if (!(eps > 0.0)) throw DomainError("bisect_mmf: eps must be positive");
  if (gamma_up < 0.0) gamma_up = bisection_upper_bound(cs, eta, p_max);
  if (!(gamma_lo < gamma_up)) throw DomainError("bisect_mmf: empty interval");

  const double entry_lo = gamma_lo;
  QoSInstance inst;
  inst.channels = &cs;
  inst.eta = eta;
  inst.p_max = p_max;
  inst.penalties = penalties;

  BisectResult res;
  while (gamma_up - gamma_lo >= eps) {
    const double mid = 0.5 * (gamma_lo + gamma_up);
    inst.gamma = mid;
    const QoSResult q = solve_qos(inst, opts);
    res.trace.push_back({gamma_lo, gamma_up, mid, q.x, q.status});
    res.solver_iterations += q.iterations;
    if (q.status == SolveStatus::Optimal && q.x <= 1.0) {
      gamma_lo = mid;
      res.gamma_star = mid;
      res.x_at_star = q.x;
      res.W = q.W;
      res.found_feasible = true;
    } else {
      gamma_up = mid;
    }
  }

  if (!res.found_feasible) {
    // fall back to the entry lower bound; with gamma_lo = 0 this cannot fail
    inst.gamma = entry_lo;
    const QoSResult q = solve_qos(inst, opts);
    res.trace.push_back({entry_lo, gamma_up, entry_lo, q.x, q.status});
    res.solver_iterations += q.iterations;
    if (!(q.status == SolveStatus::Optimal && q.x <= 1.0))
      throw BisectionError("bisect_mmf: no power-feasible target in the interval");
    res.gamma_star = entry_lo;
    res.x_at_star = q.x;
    res.W = q.W;
    res.found_feasible = true;
  }
  return res;
}

MMFResult sea(const ChannelSet& cs, const std::vector<double>& eta,
              const Eigen::VectorXd& p_max, const MmfOptions& opts,
              const BisectResult* first_stage) {
  const auto t0 = std::chrono::steady_clock::now();
  MMFResult res;

  BisectResult stage =
      first_stage ? *first_stage
                  : bisect_mmf(cs, eta, p_max, opts.eps, {}, opts.solver);
  res.bisect_trace = stage.trace;
  res.bisect_iters = static_cast<int>(stage.trace.size());

  double gamma_cur = stage.gamma_star;
  std::vector<Eigen::MatrixXcd> W = stage.W;
  std::vector<int> ranks = block_ranks(W, opts.tol_rank);
  res.rank_history.push_back(ranks);

  std::vector<Penalty> penalties;
  auto high_rank_groups = [&ranks]() {
    std::vector<int> b;
    for (size_t g = 0; g < ranks.size(); ++g)
      if (ranks[g] >= 2) b.push_back(static_cast<int>(g));
    return b;
  };

  std::vector<int> pending = high_rank_groups();
  while (!pending.empty()) {
    if (res.elim_iters >= opts.max_elim) {
      std::ostringstream msg;
      msg << "sea: elimination stalled after " << res.elim_iters
          << " iterations; ranks =";
      for (int r : ranks) msg << ' ' << r;
      msg << "; gamma = " << gamma_cur;
      throw SeaStalled(msg.str());
    }
    ++res.elim_iters;

    const int g = pending.front();
    penalties.push_back(
        {g, conic::second_eigvec(W[static_cast<size_t>(g)], opts.tol_rank),
         opts.zeta});

    const double lo = std::max(0.0, std::min(opts.kappa * gamma_cur, gamma_cur - 1.0));
    const double up = gamma_cur;
    BisectResult sub;
    try {
      sub = bisect_mmf(cs, eta, p_max, opts.eps, penalties, opts.solver, lo, up);
    } catch (const BisectionError&) {
      // shrunk interval was entirely infeasible; widen once before giving up
      sub = bisect_mmf(cs, eta, p_max, opts.eps, penalties, opts.solver, 0.0, up);
    }
    gamma_cur = sub.gamma_star;
    W = sub.W;
    res.bisect_trace.insert(res.bisect_trace.end(), sub.trace.begin(), sub.trace.end());
    res.bisect_iters += static_cast<int>(sub.trace.size());
    ranks = block_ranks(W, opts.tol_rank);
    res.rank_history.push_back(ranks);
    pending = high_rank_groups();
  }

  res.W = W;
  res.w = factorized(W);
  // power polish on the eliminated directions: per-group max-min powers, same
  // treatment the rank-1 baselines receive, leaves the binding AP tight
  try {
    const MmpcResult pc =
        mmpc_power_control(res.w, cs, eta, p_max, opts.eps, opts.solver);
    for (size_t g = 0; g < res.w.size(); ++g)
      res.w[g] = std::sqrt(std::max(pc.p(static_cast<Eigen::Index>(g)), 0.0)) *
                 res.w[g] / res.w[g].norm();
  } catch (const DomainError&) {
    // degenerate zero direction: fall back to a common feasibility rescale
    tighten_power(res.w, p_max, cs.num_aps, cs.antennas_per_ap);
  }
  res.t_star = gamma_cur;
  res.max_rank_final = ranks.empty() ? 0 : *std::max_element(ranks.begin(), ranks.end());
  fill_metrics(res, cs);
  res.runtime_ms = elapsed_ms(t0);
  return res;
}

MmpcResult mmpc_power_control(const std::vector<Eigen::VectorXcd>& directions,
                              const ChannelSet& cs, const std::vector<double>& eta,
                              const Eigen::VectorXd& p_max, double eps,
                              const conic::SolverOptions& opts) {
  const int G = cs.num_groups;
  const int K = cs.num_ues();
  const int L = cs.num_aps;
  const int N = cs.antennas_per_ap;
  if (static_cast<int>(directions.size()) != G)
    throw DomainError("mmpc: one direction per group required");
  for (const auto& d : directions)
    if (!(d.norm() > 0.0)) throw DomainError("mmpc: all-zero direction");
  if (!(eps > 0.0)) throw DomainError("mmpc: eps must be positive");

  std::vector<Eigen::VectorXcd> dir(directions.size());
  for (size_t g = 0; g < directions.size(); ++g)
    dir[g] = directions[g] / directions[g].norm();

  // gains normalized by the noise power
  Eigen::MatrixXd gain(K, G);
  for (int k = 0; k < K; ++k)
    for (int g = 0; g < G; ++g)
      gain(k, g) = std::norm(cs.h[static_cast<size_t>(k)].dot(
                       dir[static_cast<size_t>(g)])) /
                   cs.noise_power;
  Eigen::MatrixXd ap_coef(G, L);
  for (int g = 0; g < G; ++g)
    for (int l = 0; l < L; ++l)
      ap_coef(g, l) = dir[static_cast<size_t>(g)].segment(l * N, N).squaredNorm();

  // feasibility LP at target t: variables (p_1..p_G, x)
  auto solve_at = [&](double t) {
    ConicProblem p;
    p.num_scalars = G + 1;
    p.objective_scalars = {{G, 1.0}};
    for (int k = 0; k < K; ++k) {
      const int g = cs.group_of_ue[static_cast<size_t>(k)];
      const double w = t * eta[static_cast<size_t>(g)];
      ConicProblem::Constraint c;
      c.sense = Sense::GE;
      c.rhs = w;  // noise term, normalized to 1
      for (int j = 0; j < G; ++j)
        c.scalars.emplace_back(j, j == g ? gain(k, g) : -w * gain(k, j));
      p.constraints.push_back(std::move(c));
    }
    for (int l = 0; l < L; ++l) {
      ConicProblem::Constraint c;
      c.sense = Sense::LE;
      c.rhs = 0.0;
      for (int g = 0; g < G; ++g) c.scalars.emplace_back(g, ap_coef(g, l));
      c.scalars.emplace_back(G, -p_max(l));
      p.constraints.push_back(std::move(c));
    }
    return conic::solve_conic(p, opts);
  };

  double t_lo = 0.0;
  double t_up = bisection_upper_bound(cs, eta, p_max);
  MmpcResult res;
  res.p = Eigen::VectorXd::Zero(G);
  double x_best = 0.0;
  while (t_up - t_lo >= eps) {
    const double mid = 0.5 * (t_lo + t_up);
    const conic::ConicSolution sol = solve_at(mid);
    ++res.solves;
    if (sol.status == SolveStatus::Optimal && sol.scalars(G) <= 1.0) {
      t_lo = mid;
      res.p = sol.scalars.head(G);
      x_best = sol.scalars(G);
    } else {
      t_up = mid;
    }
  }

  // push the powers up to the binding AP budget; uniform scaling raises SINRs
  if (x_best > 1e-12) res.p /= x_best;
  res.p = res.p.cwiseMax(0.0);
  res.ap_power = ap_coef.transpose() * res.p;

  // achieved min weighted SINR at the final powers
  double t_ach = std::numeric_limits<double>::infinity();
  for (int k = 0; k < K; ++k) {
    const int g = cs.group_of_ue[static_cast<size_t>(k)];
    double intf = 0.0;
    for (int j = 0; j < G; ++j)
      if (j != g) intf += res.p(j) * gain(k, j);
    const double s = res.p(g) * gain(k, g) / (intf + 1.0);
    t_ach = std::min(t_ach, s / eta[static_cast<size_t>(g)]);
  }
  res.target = std::isfinite(t_ach) ? t_ach : 0.0;
  return res;
}

namespace {

MMFResult power_controlled(const std::vector<Eigen::VectorXcd>& tilde,
                           const ChannelSet& cs, const std::vector<double>& eta,
                           const Eigen::VectorXd& p_max, const MmfOptions& opts) {
  MMFResult res;
  const MmpcResult pc = mmpc_power_control(tilde, cs, eta, p_max, opts.eps, opts.solver);
  res.w.resize(tilde.size());
  for (size_t g = 0; g < tilde.size(); ++g)
    res.w[g] = std::sqrt(std::max(pc.p(static_cast<Eigen::Index>(g)), 0.0)) *
               tilde[g] / tilde[g].norm();
  res.t_star = pc.target;
  res.bisect_iters = pc.solves;
  fill_metrics(res, cs);
  return res;
}

}  // namespace

MMFResult sdr_dominant(const std::vector<Eigen::MatrixXcd>& relaxed_W,
                       const ChannelSet& cs, const std::vector<double>& eta,
                       const Eigen::VectorXd& p_max, const MmfOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  MMFResult res = power_controlled(factorized(relaxed_W), cs, eta, p_max, opts);
  res.max_rank_final = 1;
  res.runtime_ms = elapsed_ms(t0);
  return res;
}

MMFResult sdr_randomize(const std::vector<Eigen::MatrixXcd>& relaxed_W,
                        const ChannelSet& cs, const std::vector<double>& eta,
                        const Eigen::VectorXd& p_max, int n_candidates, Rng& rng,
                        const MmfOptions& opts) {
  if (n_candidates < 1) throw DomainError("sdr_randomize: need n_candidates >= 1");
  const auto t0 = std::chrono::steady_clock::now();
  const int dim = cs.dim();

  std::vector<Eigen::MatrixXcd> roots;
  roots.reserve(relaxed_W.size());
  for (const auto& Wg : relaxed_W) roots.push_back(conic::hermitian_sqrt(Wg));

  // dominant-eigenvector set first, then the Gaussian draws
  std::vector<std::vector<Eigen::VectorXcd>> candidates;
  candidates.push_back(factorized(relaxed_W));
  const std::uint64_t base = rng.engine()();
  for (int c = 0; c < n_candidates; ++c) {
    Rng sub(Rng::mix(base, static_cast<std::uint64_t>(c)));
    std::vector<Eigen::VectorXcd> set;
    set.reserve(roots.size());
    for (const auto& root : roots) {
      Eigen::VectorXcd z(dim);
      for (int i = 0; i < dim; ++i) z(i) = sub.cgaussian();
      set.push_back(root * z);
    }
    candidates.push_back(std::move(set));
  }

  MMFResult best;
  int solves = 0;
  bool have = false;
  for (const auto& cand : candidates) {
    bool degenerate = false;
    for (const auto& v : cand)
      if (!(v.norm() > 0.0)) degenerate = true;
    if (degenerate) continue;
    MMFResult r = power_controlled(cand, cs, eta, p_max, opts);
    solves += r.bisect_iters;
    if (!have || r.t_star > best.t_star) {
      best = std::move(r);
      have = true;
    }
  }
  if (!have) throw DomainError("sdr_randomize: no usable candidate set");
  best.bisect_iters = solves;
  best.max_rank_final = 1;
  best.runtime_ms = elapsed_ms(t0);
  return best;
}

}  // namespace mmfbeam::mmf
