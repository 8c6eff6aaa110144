#pragma once

#include "gatesynth/polymat.hpp"

namespace gatesynth {

/// Target unitary with its principal-branch generator.
struct TargetGate {
  CMatrix unitary;
  CMatrix log;         ///< anti-Hermitian, exp(log) == unitary
  double log_norm = 0; ///< ||log||_2, below pi by construction

  static TargetGate from_unitary(const CMatrix& u);
};

/// Principal logarithm of a unitary. The Schur form of a normal matrix is
/// diagonal, so U = Q D Q^dagger with Q unitary even for repeated
/// eigenvalues; the log is Q diag(i arg D) Q^dagger, anti-Hermitianized.
/// Throws InvalidArgument for non-unitary input and BranchAmbiguity when an
/// eigenphase lies within `branch_margin` of +-pi.
CMatrix principal_log(const CMatrix& u, double branch_margin = 1e-9);

/// ||G(x) - Omega||_F^2 as a real polynomial in the control slots of G.
Polynomial build_objective(const PolyMatrix& generator, const CMatrix& omega);

/// Phase-insensitive gate infidelity 1 - |Tr(V^dagger U)| / d, clamped to [0, 1].
double infidelity(const CMatrix& u, const CMatrix& v);

/// ||U^dagger U - I||_F.
double unitarity_defect(const CMatrix& u);

}  // namespace gatesynth
