#pragma once

#include <span>
#include <variant>

#include "gatesynth/polymat.hpp"

namespace gatesynth {

/// Control E(t) = sum_k x_k t^k with basis size m.
struct PolyControl {
  int m = 1;
};

/// Control constant at x_i on each of m equal slices of [0, T].
struct PiecewiseControl {
  int m = 1;
};

using ControlModel = std::variant<PolyControl, PiecewiseControl>;

/// H(t) = H0 + E(t) Hc over horizon T with a given control model.
class ProblemSpec {
 public:
  /// Throws InvalidArgument on non-Hermitian or mismatched Hamiltonians,
  /// T <= 0 or m < 1.
  ProblemSpec(CMatrix h0, CMatrix hc, double horizon, ControlModel control);

  int dim() const { return static_cast<int>(h0_.rows()); }
  const CMatrix& h0() const { return h0_; }
  const CMatrix& hc() const { return hc_; }
  double horizon() const { return horizon_; }
  const ControlModel& control() const { return control_; }

  bool is_piecewise() const { return std::holds_alternative<PiecewiseControl>(control_); }
  /// Number of control parameters m.
  int control_count() const;
  /// Slice width T/m (piecewise specs).
  double slice_width() const { return horizon_ / control_count(); }

  /// Scalar control E(t) for parameters x.
  double control_value(std::span<const double> x, double t) const;
  /// Numeric H(t) = H0 + E(t) Hc.
  CMatrix hamiltonian(std::span<const double> x, double t) const;

  ProblemSpec with_horizon(double horizon) const { return {h0_, hc_, horizon, control_}; }

 private:
  CMatrix h0_;
  CMatrix hc_;
  double horizon_;
  ControlModel control_;
};

/// Frobenius norm of H - H^dagger.
double hermitian_defect(const CMatrix& h);

}  // namespace gatesynth
