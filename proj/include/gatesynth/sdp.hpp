#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace gatesynth {

/// One nonzero of a symmetric block matrix. Off-diagonal entries (row != col)
/// stand for both (row, col) and (col, row).
struct SymEntry {
  int block = 0;
  int row = 0;
  int col = 0;
  double value = 0.0;
};

using SparseSym = std::vector<SymEntry>;
using BlockMatrix = std::vector<Eigen::MatrixXd>;

/// Standard-form block SDP:
///   minimize <C, X>  subject to  <A_i, X> = b_i,  X = blockdiag(X_1, ...) >= 0.
/// Its dual is  maximize b^T y  subject to  C - sum_i y_i A_i = Z >= 0.
struct SDPProblem {
  std::vector<int> block_sizes;
  std::vector<SparseSym> constraints;
  Eigen::VectorXd rhs;
  SparseSym cost;

  int total_size() const;
  /// Throws InvalidArgument on out-of-range entries or size mismatches.
  void validate() const;
};

struct SDPSettings {
  double gap_tolerance = 1e-8;          ///< relative duality gap
  double feasibility_tolerance = 1e-8;  ///< relative primal / dual residuals
  int max_iterations = 200;
  double step_fraction = 0.98;
};

enum class SDPStatus { optimal, iteration_limit, numerical_failure, infeasible };

std::string to_string(SDPStatus status);

struct SDPSolution {
  BlockMatrix x;
  BlockMatrix z;
  Eigen::VectorXd y;
  double primal_value = 0.0;
  double dual_value = 0.0;
  double relative_gap = 0.0;
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  /// b - A(X), kept for a posteriori bound corrections.
  Eigen::VectorXd primal_residual;
  int iterations = 0;
  SDPStatus status = SDPStatus::numerical_failure;
};

/// Infeasible primal-dual path following with Nesterov-Todd scaling and a
/// Mehrotra predictor-corrector. Returns the best iterate found together with
/// its status; never throws on solver trouble (check `status`).
SDPSolution sdp_solve(const SDPProblem& problem, const SDPSettings& settings = {});

/// <A, X> for a sparse symmetric A.
double inner(const SparseSym& a, const BlockMatrix& x);
BlockMatrix to_dense(const SparseSym& a, const std::vector<int>& block_sizes);

}  // namespace gatesynth
