#include "gatesynth/numerics.hpp"

#include <cmath>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "gatesynth/errors.hpp"

namespace gatesynth {

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

}  // namespace

CMatrix expm_antihermitian(const CMatrix& m) {
  if (m.rows() != m.cols()) throw DimensionMismatch("expm_antihermitian needs a square matrix");
  const double skew = (m + m.adjoint()).norm();
  if (skew > 1e-10) {
    throw InvalidArgument("expm_antihermitian: input is not anti-Hermitian (||M+M^dag||_F = " +
                          sci(skew) + ")");
  }
  // M = -i H with H = iM Hermitian, so exp(M) = V diag(exp(-i lambda)) V^dag.
  CMatrix h = Complex(0.0, 1.0) * m;
  h = 0.5 * (h + h.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(h);
  if (eig.info() != Eigen::Success) throw NumericalFailure("expm_antihermitian: eigensolver failed");
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  Eigen::VectorXcd phases(lambda.size());
  for (Eigen::Index k = 0; k < lambda.size(); ++k) phases(k) = std::polar(1.0, -lambda(k));
  const CMatrix& v = eig.eigenvectors();
  return v * phases.asDiagonal() * v.adjoint();
}

double spectral_norm(const CMatrix& m, double rel_tol) {
  if (m.size() == 0) return 0.0;
  const CMatrix gram = m.adjoint() * m;
  const Eigen::Index n = gram.rows();
  Eigen::VectorXcd v(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    v(k) = Complex(1.0 + 0.37 * static_cast<double>(k), 0.11 * static_cast<double>(k * k % 7));
  }
  v.normalize();

  // Rayleigh quotient error decays as the square of the eigenvector error, so
  // a stall criterion well below rel_tol on successive estimates suffices.
  const double stall = std::min(rel_tol, 1e-12) * 1e-2;
  double estimate = 0.0;
  constexpr int kMaxIterations = 200000;
  for (int it = 0; it < kMaxIterations; ++it) {
    Eigen::VectorXcd w = gram * v;
    const double next = std::real(v.dot(w));
    const double wn = w.norm();
    if (wn == 0.0) return 0.0;
    v = w / wn;
    if (it > 0 && std::abs(next - estimate) <= stall * std::abs(next)) {
      estimate = next;
      break;
    }
    estimate = next;
  }
  return std::sqrt(std::max(0.0, estimate));
}

namespace {

CMatrix step_exponential(const CMatrix& h, double dt) {
  return expm_antihermitian(Complex(0.0, -dt) * h);
}

// Nearest unitary (polar factor). Every step is unitary only to a few ulp, and
// over 10^4+ steps that drift reaches 1e-11; the projection moves U by about
// the drift itself, far below the propagation tolerance.
CMatrix nearest_unitary(const CMatrix& u) {
  Eigen::JacobiSVD<CMatrix> svd(u, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

}  // namespace

Propagation propagate_midpoint(const ProblemSpec& spec, std::span<const double> x, int steps) {
  if (static_cast<int>(x.size()) != spec.control_count()) {
    throw InvalidArgument("propagate: expected " + std::to_string(spec.control_count()) +
                          " control values");
  }
  const int d = spec.dim();
  Propagation out;
  out.unitary = CMatrix::Identity(d, d);

  if (spec.is_piecewise()) {
    const double dt = spec.slice_width();
    for (std::size_t i = 0; i < x.size(); ++i) {
      out.unitary = step_exponential(spec.h0() + x[i] * spec.hc(), dt) * out.unitary;
    }
    out.steps = static_cast<int>(x.size());
    return out;
  }

  if (steps < 1) throw InvalidArgument("propagate: steps must be >= 1");
  // Pairwise reduction: blocks of equal length merge like a binary counter, which
  // keeps the product roundoff down with only O(log steps) partials alive.
  const double h = spec.horizon() / steps;
  std::vector<std::pair<CMatrix, int>> stack;  // (product, block length), later blocks on top
  for (int j = 0; j < steps; ++j) {
    const double mid = (j + 0.5) * h;
    stack.emplace_back(step_exponential(spec.hamiltonian(x, mid), h), 1);
    while (stack.size() >= 2 && stack[stack.size() - 1].second == stack[stack.size() - 2].second) {
      auto& older = stack[stack.size() - 2];
      older.first = stack.back().first * older.first;
      older.second *= 2;
      stack.pop_back();
    }
  }
  for (auto it = stack.rbegin(); it != stack.rend(); ++it) out.unitary = out.unitary * it->first;
  out.unitary = nearest_unitary(out.unitary);
  out.steps = steps;
  return out;
}

Propagation propagate_reference(const ProblemSpec& spec, std::span<const double> x, int steps,
                                double tolerance) {
  if (spec.is_piecewise()) return propagate_midpoint(spec, x, steps);
  if (steps < 1) throw InvalidArgument("propagate: steps must be >= 1");
  Propagation coarse = propagate_midpoint(spec, x, steps);
  for (;;) {
    Propagation fine = propagate_midpoint(spec, x, 2 * coarse.steps);
    fine.defect = (coarse.unitary - fine.unitary).norm();
    if (fine.defect <= tolerance) return fine;
    if (fine.steps >= kMaxPropagationSteps) {
      throw NumericalFailure("propagate_reference: step-doubling defect " + sci(fine.defect) +
                             " exceeds tolerance at " + std::to_string(fine.steps) + " steps");
    }
    coarse = std::move(fine);
  }
}

namespace {

struct SimpsonState {
  const ProblemSpec* spec;
  std::span<const double> x;
  int evaluations = 0;
};

double norm_at(SimpsonState& s, double t) {
  ++s.evaluations;
  return spectral_norm(s.spec->hamiltonian(s.x, t), 1e-12);
}

double adaptive_simpson(SimpsonState& s, double a, double b, double fa, double fm, double fb,
                        double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = norm_at(s, lm);
  const double frm = norm_at(s, rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  if (depth <= 0) throw NumericalFailure("action_integral: adaptive quadrature did not converge");
  return adaptive_simpson(s, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(s, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double action_integral(const ProblemSpec& spec, std::span<const double> x, double abs_tol) {
  if (spec.is_piecewise()) {
    double total = 0.0;
    for (double xi : x) total += spec.slice_width() * spectral_norm(spec.h0() + xi * spec.hc(), 1e-12);
    return total;
  }
  SimpsonState s{&spec, x};
  const double a = 0.0;
  const double b = spec.horizon();
  const double fa = norm_at(s, a);
  const double fm = norm_at(s, 0.5 * (a + b));
  const double fb = norm_at(s, b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(s, a, b, fa, fm, fb, whole, abs_tol, 50);
}

}  // namespace gatesynth
