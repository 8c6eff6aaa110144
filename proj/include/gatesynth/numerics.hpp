#pragma once

#include <span>

#include "gatesynth/polymat.hpp"
#include "gatesynth/problem.hpp"

namespace gatesynth {

/// exp(M) for anti-Hermitian M via the eigendecomposition of the Hermitian iM.
/// Throws InvalidArgument when ||M + M^dagger||_F > 1e-10.
CMatrix expm_antihermitian(const CMatrix& m);

/// Largest singular value by power iteration on M^dagger M.
double spectral_norm(const CMatrix& m, double rel_tol = 1e-10);

inline constexpr int kDefaultPropagationSteps = 16384;
inline constexpr double kPropagationTolerance = 1e-10;
inline constexpr int kMaxPropagationSteps = 1 << 20;

struct Propagation {
  CMatrix unitary;
  /// ||U_h - U_{h/2}||_F; zero for piecewise specs (exact slice products).
  double defect = 0.0;
  int steps = 0;
};

/// Exponential-midpoint product U = prod_{j=steps..1} exp(-i h H(t_j^mid)),
/// h = T/steps, or the exact slice product for piecewise-constant specs.
/// No tolerance check is applied; see propagate_reference for the checked form.
Propagation propagate_midpoint(const ProblemSpec& spec, std::span<const double> x, int steps);

/// Reference propagator U(T, x). Runs the midpoint rule at `steps`, then keeps
/// doubling until two successive products differ by at most `tolerance` and
/// returns the finer one. Throws NumericalFailure if kMaxPropagationSteps is
/// reached first.
Propagation propagate_reference(const ProblemSpec& spec, std::span<const double> x,
                                int steps = kDefaultPropagationSteps,
                                double tolerance = kPropagationTolerance);

/// int_0^T ||A(t, x)||_2 dt with A = -i H(t). Adaptive Simpson for polynomial
/// controls, exact slice sum for piecewise ones.
double action_integral(const ProblemSpec& spec, std::span<const double> x, double abs_tol = 1e-8);

}  // namespace gatesynth
