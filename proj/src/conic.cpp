#include "mmfbeam/conic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace mmfbeam::conic {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Element of the cone space: Hermitian PSD blocks plus a nonnegative vector.
struct Vec {
  std::vector<Eigen::MatrixXcd> X;
  Eigen::VectorXd lp;

  static Vec zeros(const std::vector<int>& dims, int nlp) {
    Vec v;
    v.X.reserve(dims.size());
    for (int n : dims) v.X.push_back(Eigen::MatrixXcd::Zero(n, n));
    v.lp = Eigen::VectorXd::Zero(nlp);
    return v;
  }
  static Vec identity(const std::vector<int>& dims, int nlp) {
    Vec v;
    v.X.reserve(dims.size());
    for (int n : dims) v.X.push_back(Eigen::MatrixXcd::Identity(n, n));
    v.lp = Eigen::VectorXd::Ones(nlp);
    return v;
  }
  void axpy(double a, const Vec& o) {
    for (size_t b = 0; b < X.size(); ++b) X[b] += a * o.X[b];
    lp += a * o.lp;
  }
};

double cdot(const Vec& a, const Vec& b) {
  double s = a.lp.dot(b.lp);
  for (size_t i = 0; i < a.X.size(); ++i) s += hdot(a.X[i], b.X[i]);
  return s;
}

double cnorm(const Vec& a) {
  double s = a.lp.squaredNorm();
  for (const auto& x : a.X) s += x.squaredNorm();
  return std::sqrt(s);
}

struct ConeBreakdown {};

/// Cholesky with a tightly capped jitter: iterates are kept interior by the
/// step guard, so anything beyond roundoff-level repair means the iterate is
/// lost and the solve must stop at the best recorded point.
Eigen::MatrixXcd robust_chol(const Eigen::MatrixXcd& a) {
  Eigen::LLT<Eigen::MatrixXcd> llt(a);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  double jitter = 1e-15 * std::max(1e-300, a.trace().real() / a.rows());
  for (int k = 0; k < 8; ++k) {
    Eigen::MatrixXcd aj = a + jitter * Eigen::MatrixXcd::Identity(a.rows(), a.cols());
    llt.compute(aj);
    if (llt.info() == Eigen::Success) return llt.matrixL();
    jitter *= 10.0;
  }
  throw ConeBreakdown{};
}

bool is_pd(const Eigen::MatrixXcd& a) {
  return Eigen::LLT<Eigen::MatrixXcd>(a).info() == Eigen::Success;
}

/// Nesterov-Todd scaling of one PSD block: r with r^-1 X r^-H = r^H S r = diag(lam).
struct NtBlock {
  Eigen::MatrixXcd r, rinv, G;  // G = r r^H
  Eigen::VectorXd lam;
};

NtBlock nt_scaling(const Eigen::MatrixXcd& X, const Eigen::MatrixXcd& S) {
  const Eigen::MatrixXcd Lx = robust_chol(X);
  const Eigen::MatrixXcd Ls = robust_chol(S);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(Ls.adjoint() * Lx,
                                         Eigen::ComputeFullU | Eigen::ComputeFullV);
  NtBlock nt;
  nt.lam = svd.singularValues();
  const Eigen::VectorXd li = nt.lam.cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
  nt.r = Lx * svd.matrixV() * li.asDiagonal();
  nt.rinv = li.asDiagonal() * svd.matrixU().adjoint() * Ls.adjoint();
  nt.G = nt.r * nt.r.adjoint();
  return nt;
}

/// Internal standard form: equality rows over (PSD blocks, orthant).
struct Std {
  std::vector<int> dims;
  int nlp = 0;  // user scalars followed by inequality slacks
  int nsc = 0;  // user scalars
  struct Row {
    std::vector<std::pair<int, Eigen::MatrixXcd>> blocks;
    double b = 0.0;
  };
  std::vector<Row> rows;
  Eigen::MatrixXd Alp;  // m x nlp coefficients
  Vec C;                // scaled objective
  double obj_scale = 1.0;
  // block index -> (row, pairing) incidence for adjoint/Schur assembly
  std::vector<std::vector<std::pair<int, const Eigen::MatrixXcd*>>> block_rows;

  int m() const { return static_cast<int>(rows.size()); }

  Eigen::VectorXd apply(const Vec& v) const {
    Eigen::VectorXd out = Alp * v.lp;
    for (int i = 0; i < m(); ++i)
      for (const auto& [b, A] : rows[i].blocks) out(i) += hdot(A, v.X[b]);
    return out;
  }
  Vec adjoint(const Eigen::VectorXd& y) const {
    Vec out = Vec::zeros(dims, nlp);
    for (size_t b = 0; b < dims.size(); ++b)
      for (const auto& [i, A] : block_rows[b]) out.X[b] += y(i) * (*A);
    out.lp = Alp.transpose() * y;
    return out;
  }
  Eigen::VectorXd rhs() const {
    Eigen::VectorXd b(m());
    for (int i = 0; i < m(); ++i) b(i) = rows[i].b;
    return b;
  }
};

Std build_standard_form(const ConicProblem& p) {
  Std s;
  s.dims = p.psd_dims;
  s.nsc = p.num_scalars;
  int n_ineq = 0;
  for (const auto& c : p.constraints)
    if (c.sense != Sense::EQ) ++n_ineq;
  s.nlp = p.num_scalars + n_ineq;

  const int m = static_cast<int>(p.constraints.size());
  s.rows.resize(m);
  s.Alp = Eigen::MatrixXd::Zero(m, s.nlp);

  int slack = p.num_scalars;
  for (int i = 0; i < m; ++i) {
    const auto& c = p.constraints[i];
    double nrm2 = c.rhs * c.rhs;
    for (const auto& [b, A] : c.blocks) nrm2 += A.mat().squaredNorm();
    for (const auto& [j, a] : c.scalars) nrm2 += a * a;
    const double rho = 1.0 / std::max(std::sqrt(nrm2), 1e-10);

    auto& row = s.rows[i];
    row.b = rho * c.rhs;
    for (const auto& [b, A] : c.blocks) row.blocks.emplace_back(b, rho * A.mat());
    for (const auto& [j, a] : c.scalars) s.Alp(i, j) += rho * a;
    if (c.sense == Sense::LE) s.Alp(i, slack++) = 1.0;
    if (c.sense == Sense::GE) s.Alp(i, slack++) = -1.0;
  }

  // objective, scaled to unit-ish magnitude
  s.C = Vec::zeros(s.dims, s.nlp);
  double cmax = 1.0;
  for (const auto& [b, A] : p.objective_blocks)
    cmax = std::max(cmax, A.mat().cwiseAbs().maxCoeff());
  for (const auto& [j, a] : p.objective_scalars) cmax = std::max(cmax, std::abs(a));
  s.obj_scale = cmax;
  for (const auto& [b, A] : p.objective_blocks) s.C.X[b] += A.mat() / cmax;
  for (const auto& [j, a] : p.objective_scalars) s.C.lp(j) += a / cmax;

  s.block_rows.resize(s.dims.size());
  for (int i = 0; i < m; ++i)
    for (const auto& [b, A] : s.rows[i].blocks)
      s.block_rows[static_cast<size_t>(b)].emplace_back(i, &A);
  return s;
}

/// lam o U = D  =>  U_ij = 2 D_ij / (lam_i + lam_j)
Eigen::MatrixXcd solve_jordan(const Eigen::VectorXd& lam, const Eigen::MatrixXcd& D) {
  Eigen::MatrixXcd U(D.rows(), D.cols());
  for (Eigen::Index i = 0; i < D.rows(); ++i)
    for (Eigen::Index j = 0; j < D.cols(); ++j)
      U(i, j) = 2.0 * D(i, j) / (lam(i) + lam(j));
  return U;
}

double min_eig(const Eigen::MatrixXcd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

struct Direction {
  Vec dX, dS;
  Eigen::VectorXd dy;
  double dtau = 0.0, dkap = 0.0;
  std::vector<Eigen::MatrixXcd> dXhat, dShat;  // scaled, for corrector/steps
  Eigen::VectorXd dxhat_lp, dshat_lp;
};

ConicSolution solve_unconstrained(const ConicProblem& p) {
  // No rows: X = 0 is optimal iff the objective has no descent ray in the cone.
  ConicSolution sol;
  bool bounded = true;
  for (const auto& [b, A] : p.objective_blocks)
    if (min_eig(A.mat()) < -1e-12) bounded = false;
  for (const auto& [j, a] : p.objective_scalars)
    if (a < -1e-12) bounded = false;
  if (!bounded) {
    sol.status = SolveStatus::Unbounded;
    return sol;
  }
  sol.status = SolveStatus::Optimal;
  for (int n : p.psd_dims) sol.blocks.push_back(Eigen::MatrixXcd::Zero(n, n));
  sol.scalars = Eigen::VectorXd::Zero(p.num_scalars);
  sol.objective = 0.0;
  sol.gap = 0.0;
  return sol;
}

}  // namespace

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::MaxIter: return "max_iter";
  }
  return "?";
}

void ConicProblem::validate() const {
  for (int n : psd_dims)
    if (n < 1) throw DomainError("ConicProblem: PSD block dimension < 1");
  if (num_scalars < 0) throw DomainError("ConicProblem: negative scalar count");
  if (psd_dims.empty() && num_scalars == 0)
    throw DomainError("ConicProblem: no variables");
  auto check_terms = [&](const std::vector<std::pair<int, HermitianMatrix>>& bl,
                         const std::vector<std::pair<int, double>>& sc) {
    for (const auto& [b, A] : bl) {
      if (b < 0 || b >= num_blocks()) throw DomainError("ConicProblem: block index");
      if (A.dim() != psd_dims[static_cast<size_t>(b)])
        throw DomainError("ConicProblem: pairing dimension mismatch");
      if (!A.mat().allFinite()) throw DomainError("ConicProblem: non-finite pairing");
    }
    for (const auto& [j, a] : sc) {
      if (j < 0 || j >= num_scalars) throw DomainError("ConicProblem: scalar index");
      if (!std::isfinite(a)) throw DomainError("ConicProblem: non-finite coefficient");
    }
  };
  check_terms(objective_blocks, objective_scalars);
  for (const auto& c : constraints) {
    check_terms(c.blocks, c.scalars);
    if (!std::isfinite(c.rhs)) throw DomainError("ConicProblem: non-finite rhs");
  }
}

ConicSolution solve_conic(const ConicProblem& p, const SolverOptions& opts) {
  p.validate();
  if (p.constraints.empty()) return solve_unconstrained(p);

  const Std sf = build_standard_form(p);
  const int m = sf.m();
  const int nlp = sf.nlp;
  const size_t nb = sf.dims.size();
  const Eigen::VectorXd b = sf.rhs();
  const double bnorm = b.norm();
  const double cnorm_data = cnorm(sf.C);
  double nu = nlp;
  for (int n : sf.dims) nu += n;

  // Homogeneous self-dual iterate
  Vec X = Vec::identity(sf.dims, nlp);
  Vec S = Vec::identity(sf.dims, nlp);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(m);
  double tau = 1.0, kap = 1.0;

  ConicSolution sol;
  sol.status = SolveStatus::MaxIter;

  // best-so-far iterate; late steps can degrade numerically
  Vec Xb = X, Sb = S;
  Eigen::VectorXd yb = y;
  double taub = tau, kapb = kap;
  double best_score = kInf;

  auto finish_optimal = [&](int iters) {
    sol.status = SolveStatus::Optimal;
    sol.iterations = iters;
    sol.blocks.clear();
    for (size_t bi = 0; bi < nb; ++bi) sol.blocks.push_back(X.X[bi] / tau);
    sol.scalars = X.lp.head(sf.nsc) / tau;
    // objective and gap reported on the caller's data
    double obj = 0.0;
    for (const auto& [bi, A] : p.objective_blocks) obj += hdot(A.mat(), sol.blocks[static_cast<size_t>(bi)]);
    for (const auto& [j, a] : p.objective_scalars) obj += a * sol.scalars(j);
    sol.objective = obj;
    sol.gap = std::abs(cdot(sf.C, X) / tau - b.dot(y) / tau) * sf.obj_scale;
  };

  int consecutive_tiny_steps = 0;

  for (int iter = 0; iter < opts.max_iter; ++iter) {
    // residuals of the homogeneous model
    const Eigen::VectorXd ax = sf.apply(X);
    Vec asty = sf.adjoint(y);
    Eigen::VectorXd rp = ax - tau * b;
    Vec Rd = Vec::zeros(sf.dims, nlp);
    for (size_t bi = 0; bi < nb; ++bi) Rd.X[bi] = -asty.X[bi] + tau * sf.C.X[bi] - S.X[bi];
    Rd.lp = -asty.lp + tau * sf.C.lp - S.lp;
    const double cx = cdot(sf.C, X);
    const double by = b.dot(y);
    const double rg = by - cx - kap;
    const double mu = (cdot(X, S) + tau * kap) / (nu + 1.0);

    // convergence on the de-homogenized point
    const double pobj = cx / tau;
    const double dobj = by / tau;
    const double pres = (rp / tau).norm() / (1.0 + bnorm);
    Vec drd = Vec::zeros(sf.dims, nlp);
    for (size_t bi = 0; bi < nb; ++bi) drd.X[bi] = Rd.X[bi] / tau;
    drd.lp = Rd.lp / tau;
    const double dres = cnorm(drd) / (1.0 + cnorm_data);
    const double gap_abs = std::abs(pobj - dobj);

    if (opts.trace)
      sol.trace.push_back({pobj * sf.obj_scale, dobj * sf.obj_scale, pres, dres,
                           gap_abs * sf.obj_scale, mu, 0.0});

    if (pres <= opts.tol_feas && dres <= opts.tol_feas &&
        gap_abs <= opts.tol_gap * (1.0 + std::max(std::abs(pobj), std::abs(dobj)))) {
      finish_optimal(iter);
      return sol;
    }

    const double score =
        std::max({pres / opts.tol_feas, dres / opts.tol_feas,
                  gap_abs / (opts.tol_gap * (1.0 + std::max(std::abs(pobj), std::abs(dobj))))});
    if (score < best_score) {
      best_score = score;
      Xb = X;
      Sb = S;
      yb = y;
      taub = tau;
      kapb = kap;
    }

    // certificate checks: a valid ray proves infeasibility/unboundedness
    if (by > 0.0) {
      Vec cert = Vec::zeros(sf.dims, nlp);
      for (size_t bi = 0; bi < nb; ++bi) cert.X[bi] = (asty.X[bi] + S.X[bi]) / by;
      cert.lp = (asty.lp + S.lp) / by;
      if (cnorm(cert) <= opts.tol_feas * (1.0 + y.norm() / by)) {
        sol.status = SolveStatus::Infeasible;
        sol.iterations = iter;
        return sol;
      }
    }
    if (cx < 0.0) {
      const double scale = -cx;
      if ((ax / scale).norm() <= opts.tol_feas * (1.0 + cnorm(X) / scale)) {
        sol.status = SolveStatus::Unbounded;
        sol.iterations = iter;
        return sol;
      }
    }

    // Nesterov-Todd scaling
    std::vector<NtBlock> nt(nb);
    try {
      for (size_t bi = 0; bi < nb; ++bi) nt[bi] = nt_scaling(X.X[bi], S.X[bi]);
    } catch (const ConeBreakdown&) {
      break;
    }
    const Eigen::VectorXd g_lp = (X.lp.array() / S.lp.array()).sqrt().matrix();
    const Eigen::VectorXd g2_lp = g_lp.cwiseProduct(g_lp);
    const Eigen::VectorXd lam_lp = (X.lp.array() * S.lp.array()).sqrt().matrix();

    // Schur complement M_ij = <A_i, G A_j G>
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m, m);
    if (nlp > 0) M.noalias() = sf.Alp * g2_lp.asDiagonal() * sf.Alp.transpose();
    for (size_t bi = 0; bi < nb; ++bi) {
      const auto& inc = sf.block_rows[bi];
      for (size_t jj = 0; jj < inc.size(); ++jj) {
        const Eigen::MatrixXcd T = nt[bi].G * (*inc[jj].second) * nt[bi].G;
        for (size_t ii = 0; ii <= jj; ++ii) {
          const double v = hdot(*inc[ii].second, T);
          M(inc[ii].first, inc[jj].first) += v;
          if (inc[ii].first != inc[jj].first) M(inc[jj].first, inc[ii].first) += v;
        }
      }
    }

    Eigen::LLT<Eigen::MatrixXd> mllt(M);
    if (mllt.info() != Eigen::Success) {
      double jitter = 1e-12 * std::max(1.0, M.trace() / m);
      for (int k = 0; k < 30 && mllt.info() != Eigen::Success; ++k) {
        mllt.compute(M + jitter * Eigen::MatrixXd::Identity(m, m));
        jitter *= 10.0;
      }
      if (mllt.info() != Eigen::Success) break;
    }
    // one step of iterative refinement keeps late ill-conditioned solves usable
    auto msolve = [&](const Eigen::VectorXd& rhs) {
      Eigen::VectorXd z = mllt.solve(rhs);
      z += mllt.solve(rhs - M * z);
      return z;
    };

    // G C G, u = A(GCG), q = <C, GCG>
    Vec GCG = Vec::zeros(sf.dims, nlp);
    for (size_t bi = 0; bi < nb; ++bi) GCG.X[bi] = nt[bi].G * sf.C.X[bi] * nt[bi].G;
    GCG.lp = g2_lp.cwiseProduct(sf.C.lp);
    const Eigen::VectorXd u = sf.apply(GCG);
    const double q = cdot(sf.C, GCG);
    const Eigen::VectorXd z1 = msolve(b + u);
    double denom = (b - u).dot(z1) + q + kap / tau;
    if (!(denom > 1e-300)) denom = 1e-300;

    auto solve_direction = [&](double sigma, const Direction* aff) {
      Direction d;
      const double eta = 1.0 - sigma;
      // complementarity right-hand sides in scaled space
      Vec E = Vec::zeros(sf.dims, nlp);
      for (size_t bi = 0; bi < nb; ++bi) {
        const int n = sf.dims[bi];
        Eigen::MatrixXcd D = -nt[bi].lam.cwiseProduct(nt[bi].lam).asDiagonal().toDenseMatrix().cast<cxd>();
        if (sigma > 0.0)
          D += sigma * mu * Eigen::MatrixXcd::Identity(n, n);
        if (aff)
          D -= 0.5 * (aff->dXhat[bi] * aff->dShat[bi] + aff->dShat[bi] * aff->dXhat[bi]);
        const Eigen::MatrixXcd U = solve_jordan(nt[bi].lam, D);
        E.X[bi] = nt[bi].rinv.adjoint() * U * nt[bi].rinv - eta * Rd.X[bi];
      }
      {
        Eigen::VectorXd d_lp = -lam_lp.cwiseProduct(lam_lp);
        if (sigma > 0.0) d_lp.array() += sigma * mu;
        if (aff) d_lp -= aff->dxhat_lp.cwiseProduct(aff->dshat_lp);
        E.lp = (d_lp.array() / lam_lp.array() / g_lp.array()).matrix() - eta * Rd.lp;
      }
      const double dtk = sigma * mu - tau * kap - (aff ? aff->dtau * aff->dkap : 0.0);

      Vec GEG = Vec::zeros(sf.dims, nlp);
      for (size_t bi = 0; bi < nb; ++bi) GEG.X[bi] = nt[bi].G * E.X[bi] * nt[bi].G;
      GEG.lp = g2_lp.cwiseProduct(E.lp);

      const Eigen::VectorXd r1 = -eta * rp - sf.apply(GEG);
      const double r2 = -eta * rg + cdot(sf.C, GEG) + dtk / tau;
      const Eigen::VectorXd z2 = msolve(r1);
      d.dtau = (r2 - (b - u).dot(z2)) / denom;
      d.dy = z2 + d.dtau * z1;

      Vec asty_d = sf.adjoint(d.dy);
      d.dX = Vec::zeros(sf.dims, nlp);
      d.dS = Vec::zeros(sf.dims, nlp);
      for (size_t bi = 0; bi < nb; ++bi) {
        d.dX.X[bi] =
            nt[bi].G * (asty_d.X[bi] - d.dtau * sf.C.X[bi] + E.X[bi]) * nt[bi].G;
        d.dS.X[bi] = -asty_d.X[bi] + d.dtau * sf.C.X[bi] + eta * Rd.X[bi];
      }
      d.dX.lp = g2_lp.cwiseProduct(asty_d.lp - d.dtau * sf.C.lp + E.lp);
      d.dS.lp = -asty_d.lp + d.dtau * sf.C.lp + eta * Rd.lp;
      d.dkap = (dtk - kap * d.dtau) / tau;

      d.dXhat.resize(nb);
      d.dShat.resize(nb);
      for (size_t bi = 0; bi < nb; ++bi) {
        d.dXhat[bi] = nt[bi].rinv * d.dX.X[bi] * nt[bi].rinv.adjoint();
        d.dShat[bi] = nt[bi].r.adjoint() * d.dS.X[bi] * nt[bi].r;
      }
      d.dxhat_lp = d.dX.lp.cwiseQuotient(g_lp);
      d.dshat_lp = d.dS.lp.cwiseProduct(g_lp);
      return d;
    };

    auto step_to_boundary = [&](const Direction& d) {
      double a = kInf;
      for (size_t bi = 0; bi < nb; ++bi) {
        const Eigen::VectorXd lih = nt[bi].lam.cwiseSqrt().cwiseInverse();
        const double ex =
            min_eig(lih.asDiagonal() * d.dXhat[bi] * lih.asDiagonal());
        const double es =
            min_eig(lih.asDiagonal() * d.dShat[bi] * lih.asDiagonal());
        if (ex < 0.0) a = std::min(a, -1.0 / ex);
        if (es < 0.0) a = std::min(a, -1.0 / es);
      }
      for (int i = 0; i < nlp; ++i) {
        if (d.dX.lp(i) < 0.0) a = std::min(a, -X.lp(i) / d.dX.lp(i));
        if (d.dS.lp(i) < 0.0) a = std::min(a, -S.lp(i) / d.dS.lp(i));
      }
      if (d.dtau < 0.0) a = std::min(a, -tau / d.dtau);
      if (d.dkap < 0.0) a = std::min(a, -kap / d.dkap);
      return a;
    };

    const Direction aff = solve_direction(0.0, nullptr);
    const double a_aff = std::min(1.0, step_to_boundary(aff));

    // Mehrotra centering weight from the affine trial point
    double gap_aff = (tau + a_aff * aff.dtau) * (kap + a_aff * aff.dkap);
    {
      Vec Xa = X, Sa = S;
      Xa.axpy(a_aff, aff.dX);
      Sa.axpy(a_aff, aff.dS);
      gap_aff += cdot(Xa, Sa);
    }
    const double mu_aff = std::max(gap_aff, 0.0) / (nu + 1.0);
    double sigma = std::pow(mu_aff / std::max(mu, 1e-300), 3.0);
    sigma = std::clamp(sigma, 1e-8, 0.999);

    const Direction comb = solve_direction(sigma, &aff);
    double alpha = std::min(1.0, 0.99 * step_to_boundary(comb));

    // keep the trial point strictly inside the cone; the eigenvalue step
    // bound can be overshot by roundoff once mu is tiny
    bool stepped = false;
    for (int bt = 0; bt < 8 && !stepped; ++bt) {
      Vec Xt = X, St = S;
      Xt.axpy(alpha, comb.dX);
      St.axpy(alpha, comb.dS);
      const double taut = tau + alpha * comb.dtau;
      const double kapt = kap + alpha * comb.dkap;
      const double mut = cdot(Xt, St) + taut * kapt;
      bool ok = std::isfinite(mut) && mut > 0.0 && taut > 0.0 && kapt > 0.0 &&
                (nlp == 0 || (Xt.lp.minCoeff() > 0.0 && St.lp.minCoeff() > 0.0));
      for (size_t bi = 0; ok && bi < nb; ++bi)
        ok = is_pd(Xt.X[bi]) && is_pd(St.X[bi]);
      if (ok) {
        X = std::move(Xt);
        S = std::move(St);
        y += alpha * comb.dy;
        tau = taut;
        kap = kapt;
        stepped = true;
      } else {
        alpha *= 0.5;
      }
    }
    if (!stepped) break;
    sol.iterations = iter + 1;
    if (opts.trace && !sol.trace.empty()) sol.trace.back().step = alpha;

    if (alpha < 1e-5) {
      if (++consecutive_tiny_steps >= 3) break;
    } else {
      consecutive_tiny_steps = 0;
    }
    if (mu < 1e-18 || tau < 1e-14) break;
  }

  // loose exit from the best recorded iterate rather than reporting MaxIter
  if (best_score <= 100.0) {
    X = Xb;
    S = Sb;
    y = yb;
    tau = taub;
    kap = kapb;
    finish_optimal(sol.iterations);
    return sol;
  }
  sol.status = SolveStatus::MaxIter;
  return sol;
}

void dump_problem(const ConicProblem& p, std::ostream& os) {
  os << "conic-problem v1\n";
  os << "psd_dims";
  for (int n : p.psd_dims) os << ' ' << n;
  os << "\nscalars " << p.num_scalars << "\n";
  auto dump_terms = [&os](const std::vector<std::pair<int, HermitianMatrix>>& bl,
                          const std::vector<std::pair<int, double>>& sc) {
    for (const auto& [b, A] : bl) {
      const auto& M = A.mat();
      for (Eigen::Index i = 0; i < M.rows(); ++i)
        for (Eigen::Index j = i; j < M.cols(); ++j)
          if (std::abs(M(i, j)) > 0.0)
            os << "  B " << b << ' ' << i << ' ' << j << ' ' << M(i, j).real()
               << ' ' << M(i, j).imag() << '\n';
    }
    for (const auto& [j, a] : sc)
      if (a != 0.0) os << "  s " << j << ' ' << a << '\n';
  };
  os << "objective\n";
  dump_terms(p.objective_blocks, p.objective_scalars);
  for (size_t i = 0; i < p.constraints.size(); ++i) {
    const auto& c = p.constraints[i];
    const char* sense = c.sense == Sense::LE ? "<=" : (c.sense == Sense::GE ? ">=" : "==");
    os << "constraint " << i << ' ' << sense << ' ' << c.rhs << '\n';
    dump_terms(c.blocks, c.scalars);
  }
}

}  // namespace mmfbeam::conic
