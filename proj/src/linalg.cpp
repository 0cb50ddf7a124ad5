#include "mmfbeam/linalg.hpp"

#include <algorithm>

namespace mmfbeam::conic {

double hdot(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  return a.cwiseProduct(b.conjugate()).sum().real();
}

EigResult eig_hermitian(const Eigen::MatrixXcd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a);
  if (es.info() != Eigen::Success) throw DomainError("eig_hermitian: decomposition failed");
  const Eigen::Index n = a.rows();
  EigResult out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  // Eigen returns ascending order
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values(i) = es.eigenvalues()(n - 1 - i);
    out.vectors.col(i) = es.eigenvectors().col(n - 1 - i);
  }
  return out;
}

int numerical_rank(const Eigen::MatrixXcd& a, double tol_rank, double tol_abs) {
  const EigResult e = eig_hermitian(a);
  const double lmax = e.values.size() ? e.values(0) : 0.0;
  if (lmax <= tol_abs) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < e.values.size(); ++i)
    if (e.values(i) > tol_rank * lmax) ++r;
  return r;
}

Eigen::VectorXcd phase_normalize(const Eigen::VectorXcd& v) {
  Eigen::Index best = 0;
  double best_mag = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double m = std::abs(v(i));
    if (m > best_mag) {
      best_mag = m;
      best = i;
    }
  }
  if (best_mag <= 0.0) return v;
  const cxd rot = std::conj(v(best)) / best_mag;
  return v * rot;
}

Eigen::VectorXcd second_eigvec(const Eigen::MatrixXcd& a, double tol_rank) {
  if (numerical_rank(a, tol_rank) < 2)
    throw PreconditionError("second_eigvec: matrix has numerical rank < 2");
  const EigResult e = eig_hermitian(a);
  return phase_normalize(e.vectors.col(1));
}

Eigen::MatrixXcd hermitian_sqrt(const Eigen::MatrixXcd& a) {
  const EigResult e = eig_hermitian(a);
  Eigen::VectorXd s = e.values.cwiseMax(0.0).cwiseSqrt();
  return e.vectors * s.asDiagonal() * e.vectors.adjoint();
}

Eigen::VectorXcd dominant_component(const Eigen::MatrixXcd& a) {
  const EigResult e = eig_hermitian(a);
  const double l1 = std::max(e.values(0), 0.0);
  return phase_normalize(e.vectors.col(0)) * std::sqrt(l1);
}

}  // namespace mmfbeam::conic
