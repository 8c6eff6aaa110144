#include "gatesynth/problem.hpp"

#include <cmath>
#include <string>

#include "gatesynth/errors.hpp"

namespace gatesynth {

double hermitian_defect(const CMatrix& h) { return (h - h.adjoint()).norm(); }

ProblemSpec::ProblemSpec(CMatrix h0, CMatrix hc, double horizon, ControlModel control)
    : h0_(std::move(h0)), hc_(std::move(hc)), horizon_(horizon), control_(control) {
  if (h0_.rows() != h0_.cols() || hc_.rows() != hc_.cols() || h0_.rows() != hc_.rows() ||
      h0_.rows() == 0) {
    throw InvalidArgument("H0 and Hc must be square matrices of equal, nonzero dimension");
  }
  if (hermitian_defect(h0_) > 1e-12) throw InvalidArgument("H0 is not Hermitian");
  if (hermitian_defect(hc_) > 1e-12) throw InvalidArgument("Hc is not Hermitian");
  if (!(horizon_ > 0.0) || !std::isfinite(horizon_)) throw InvalidArgument("horizon T must be positive");
  if (control_count() < 1) throw InvalidArgument("control dimension m must be at least 1");
}

int ProblemSpec::control_count() const {
  return std::visit([](const auto& c) { return c.m; }, control_);
}

double ProblemSpec::control_value(std::span<const double> x, double t) const {
  if (static_cast<int>(x.size()) != control_count()) {
    throw InvalidArgument("expected " + std::to_string(control_count()) + " control values");
  }
  if (is_piecewise()) {
    const int m = control_count();
    int slice = static_cast<int>(std::floor(t / slice_width()));
    if (slice < 0) slice = 0;
    if (slice >= m) slice = m - 1;
    return x[static_cast<std::size_t>(slice)];
  }
  double e = 0.0;
  for (std::size_t k = x.size(); k-- > 0;) e = e * t + x[k];
  return e;
}

CMatrix ProblemSpec::hamiltonian(std::span<const double> x, double t) const {
  return h0_ + control_value(x, t) * hc_;
}

}  // namespace gatesynth
