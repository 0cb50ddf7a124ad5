#pragma once

#include <Eigen/Dense>

#include "mmfbeam/types.hpp"

namespace mmfbeam::conic {

/// Hermitian matrix; symmetrized on construction so A == A^H holds exactly.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  explicit HermitianMatrix(const Eigen::MatrixXcd& a) {
    if (a.rows() != a.cols()) throw DomainError("HermitianMatrix: non-square input");
    m_ = 0.5 * (a + a.adjoint());
  }
  static HermitianMatrix zero(Eigen::Index n) {
    return HermitianMatrix(Eigen::MatrixXcd::Zero(n, n));
  }

  const Eigen::MatrixXcd& mat() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }
  bool empty() const { return m_.size() == 0; }

 private:
  Eigen::MatrixXcd m_;
};

/// Real inner product Re tr(A B) for Hermitian A, B.
double hdot(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

struct EigResult {
  Eigen::VectorXd values;   // descending
  Eigen::MatrixXcd vectors; // columns, orthonormal, same order
};

EigResult eig_hermitian(const Eigen::MatrixXcd& a);

/// Number of eigenvalues above tol_rank * lambda_max; 0 if lambda_max <= tol_abs.
int numerical_rank(const Eigen::MatrixXcd& a, double tol_rank = 1e-4,
                   double tol_abs = 1e-12);

/// Unit eigenvector of the second-largest eigenvalue. The phase is fixed by
/// rotating the largest-magnitude component (lowest index on ties) to the
/// positive real axis. Throws PreconditionError if numerical_rank < 2.
Eigen::VectorXcd second_eigvec(const Eigen::MatrixXcd& a, double tol_rank = 1e-4);

/// PSD square root with negative eigenvalues clipped at zero.
Eigen::MatrixXcd hermitian_sqrt(const Eigen::MatrixXcd& a);

/// Dominant eigenpair convenience: sqrt(lambda_1) * v_1 (phase-normalized).
Eigen::VectorXcd dominant_component(const Eigen::MatrixXcd& a);

/// Rotate the largest-magnitude entry (lowest index on ties) to real-positive.
Eigen::VectorXcd phase_normalize(const Eigen::VectorXcd& v);

}  // namespace mmfbeam::conic
