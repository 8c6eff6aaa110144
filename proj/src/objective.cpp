#include "gatesynth/objective.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

#include "gatesynth/errors.hpp"
#include "gatesynth/numerics.hpp"

namespace gatesynth {

double unitarity_defect(const CMatrix& u) {
  return (u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols())).norm();
}

CMatrix principal_log(const CMatrix& u, double branch_margin) {
  if (u.rows() != u.cols()) throw DimensionMismatch("principal_log needs a square matrix");
  const double defect = unitarity_defect(u);
  if (defect > 1e-10) {
    throw InvalidArgument("principal_log: input is not unitary (||U^dag U - I||_F = " +
                          std::to_string(defect) + ")");
  }
  Eigen::ComplexSchur<CMatrix> schur(u);
  if (schur.info() != Eigen::Success) throw NumericalFailure("principal_log: Schur decomposition failed");
  const CMatrix& t = schur.matrixT();
  const CMatrix& q = schur.matrixU();

  Eigen::VectorXcd phases(t.rows());
  for (Eigen::Index j = 0; j < t.rows(); ++j) {
    const double theta = std::arg(t(j, j));
    if (std::abs(theta) > std::numbers::pi - branch_margin) {
      throw BranchAmbiguity("principal_log: eigenphase " + std::to_string(theta) +
                            " is within the branch margin of +-pi");
    }
    phases(j) = Complex(0.0, theta);
  }
  CMatrix omega = q * phases.asDiagonal() * q.adjoint();
  return 0.5 * (omega - omega.adjoint());
}

TargetGate TargetGate::from_unitary(const CMatrix& u) {
  TargetGate g;
  g.unitary = u;
  g.log = principal_log(u);
  g.log_norm = spectral_norm(g.log);
  return g;
}

Polynomial build_objective(const PolyMatrix& generator, const CMatrix& omega) {
  if (generator.ring().times() != 0) throw InvalidArgument("objective generator still has time slots");
  if (omega.rows() != generator.dim() || omega.cols() != generator.dim()) {
    throw DimensionMismatch("target log dimension " + std::to_string(omega.rows()) +
                            " does not match generator dimension " + std::to_string(generator.dim()));
  }
  return frobenius_sq(generator - PolyMatrix::from_numeric(generator.ring(), omega));
}

double infidelity(const CMatrix& u, const CMatrix& v) {
  if (u.rows() != v.rows() || u.cols() != v.cols() || u.rows() != u.cols()) {
    throw DimensionMismatch("infidelity needs square unitaries of equal dimension");
  }
  const double d = static_cast<double>(u.rows());
  const double overlap = std::abs((v.adjoint() * u).trace()) / d;
  return std::clamp(1.0 - overlap, 0.0, 1.0);
}

}  // namespace gatesynth
