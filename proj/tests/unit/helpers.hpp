#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "gatesynth/polymat.hpp"

namespace testutil {

using gatesynth::CMatrix;
using gatesynth::Complex;

inline const Complex I1{0.0, 1.0};

inline CMatrix sigma_x() {
  CMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

inline CMatrix sigma_z() {
  CMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

inline CMatrix random_hermitian(int d, std::mt19937_64& g) {
  std::normal_distribution<double> n;
  CMatrix a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = Complex(n(g), n(g));
  return 0.5 * (a + a.adjoint());
}

// anti-Hermitian with spectral norm exactly `norm`
inline CMatrix random_antihermitian(int d, double norm, std::mt19937_64& g) {
  CMatrix h = random_hermitian(d, g);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  const double top = es.eigenvalues().cwiseAbs().maxCoeff();
  return (-I1 * norm / top) * h;
}

inline std::vector<double> random_point(int m, std::mt19937_64& g, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> x(static_cast<std::size_t>(m));
  for (double& v : x) v = u(g);
  return x;
}

// Pade exponential and Schur-Parlett logarithm from Eigen's unsupported module
inline CMatrix oracle_expm(const CMatrix& m) { return m.exp(); }
inline CMatrix oracle_logm(const CMatrix& m) { return m.log(); }

// Composite Gauss-Legendre (5 points per panel) on [a, b].
template <typename F>
double gauss(F&& f, double a, double b, int panels = 64) {
  static const double xs[5] = {0.0, -0.5384693101056831, 0.5384693101056831, -0.9061798459386640,
                               0.9061798459386640};
  static const double ws[5] = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665,
                               0.2369268850561891, 0.2369268850561891};
  const double h = (b - a) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    for (int k = 0; k < 5; ++k) sum += ws[k] * f(mid + 0.5 * h * xs[k]);
  }
  return 0.5 * h * sum;
}

}  // namespace testutil
