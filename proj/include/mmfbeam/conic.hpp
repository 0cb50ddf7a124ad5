#pragma once

#include <iosfwd>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mmfbeam/linalg.hpp"
#include "mmfbeam/types.hpp"

namespace mmfbeam::conic {

enum class Sense { LE, GE, EQ };
enum class SolveStatus { Optimal, Infeasible, Unbounded, MaxIter };

const char* to_string(SolveStatus s);

/// Standard-form program over a product of complex Hermitian PSD blocks and
/// nonnegative scalars:
///
///   minimize    sum_b <C_b, W_b> + c' s
///   subject to  sum_b <A_ib, W_b> + a_i' s  {<=,>=,=}  rhs_i
///               W_b >= 0 (PSD),  s >= 0
///
/// with <A,B> = Re tr(A B). An LP is the special case with no PSD blocks.
struct ConicProblem {
  std::vector<int> psd_dims;
  int num_scalars = 0;

  // Objective; missing entries mean zero.
  std::vector<std::pair<int, HermitianMatrix>> objective_blocks;
  std::vector<std::pair<int, double>> objective_scalars;

  struct Constraint {
    std::vector<std::pair<int, HermitianMatrix>> blocks;  // (block index, pairing)
    std::vector<std::pair<int, double>> scalars;          // (scalar index, coeff)
    Sense sense = Sense::LE;
    double rhs = 0.0;
  };
  std::vector<Constraint> constraints;

  int num_blocks() const { return static_cast<int>(psd_dims.size()); }
  void validate() const;
};

struct SolverOptions {
  double tol_gap = 1e-7;
  double tol_feas = 1e-8;
  int max_iter = 100;
  bool trace = false;  // record per-iteration progress
};

struct IterateInfo {
  double primal_obj, dual_obj, primal_res, dual_res, gap, mu, step;
};

struct ConicSolution {
  SolveStatus status = SolveStatus::MaxIter;
  std::vector<Eigen::MatrixXcd> blocks;  // PSD at the stated tolerances
  Eigen::VectorXd scalars;
  double objective = std::numeric_limits<double>::quiet_NaN();
  double gap = std::numeric_limits<double>::quiet_NaN();
  int iterations = 0;
  std::vector<IterateInfo> trace;  // filled when SolverOptions::trace
};

/// Homogeneous self-dual path-following interior-point solve. Infeasible is
/// reported only with a certificate (ray with positive dual objective);
/// Unbounded with an improving primal ray.
ConicSolution solve_conic(const ConicProblem& p, const SolverOptions& opts = {});

/// Debug dump: sparse triplets of every pairing matrix, for cross-checking
/// against external solvers.
void dump_problem(const ConicProblem& p, std::ostream& os);

}  // namespace mmfbeam::conic
