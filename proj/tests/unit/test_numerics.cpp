#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "gatesynth/errors.hpp"
#include "gatesynth/hamlib.hpp"
#include "gatesynth/numerics.hpp"
#include "gatesynth/objective.hpp"
#include "gatesynth/problem.hpp"
#include "helpers.hpp"

using namespace gatesynth;
using testutil::I1;

namespace {

ProblemSpec ibm_spec(double T, int m, bool piecewise = false) {
  const SystemPair s = ibmq3();
  return {s.h0, s.hc, T, piecewise ? ControlModel{PiecewiseControl{m}} : ControlModel{PolyControl{m}}};
}

}  // namespace

TEST_CASE("problem spec validation") {
  const SystemPair s = ibmq3();
  CHECK_NOTHROW(ProblemSpec(s.h0, s.hc, 0.5, PolyControl{3}));
  CMatrix bad = s.hc;
  bad(0, 1) += 1e-9;
  CHECK_THROWS_AS(ProblemSpec(s.h0, bad, 0.5, PolyControl{3}), InvalidArgument);
  CHECK_THROWS_AS(ProblemSpec(s.h0, s.hc, 0.0, PolyControl{3}), InvalidArgument);
  CHECK_THROWS_AS(ProblemSpec(s.h0, s.hc, 0.5, PolyControl{0}), InvalidArgument);
  CHECK_THROWS_AS(ProblemSpec(s.h0, CMatrix::Identity(2, 2), 0.5, PolyControl{1}), InvalidArgument);

  const ProblemSpec spec = ibm_spec(0.5, 3);
  const std::vector<double> x{0.2, -0.4, 1.5};
  CHECK(spec.control_value(x, 0.3) == doctest::Approx(0.2 - 0.4 * 0.3 + 1.5 * 0.09));
  const ProblemSpec pw = ibm_spec(0.6, 3, true);
  CHECK(pw.slice_width() == doctest::Approx(0.2));
  CHECK(pw.control_value(x, 0.1) == 0.2);
  CHECK(pw.control_value(x, 0.3) == -0.4);
  CHECK(pw.control_value(x, 0.6) == 1.5);
}

TEST_CASE("expm_antihermitian") {
  CHECK((expm_antihermitian(CMatrix::Zero(3, 3)) - CMatrix::Identity(3, 3)).norm() < 1e-15);
  const CMatrix e = expm_antihermitian(-I1 * (std::numbers::pi / 2) * testutil::sigma_x());
  CHECK((e - (-I1) * testutil::sigma_x()).norm() < 1e-14);

  std::mt19937_64 g(1);
  for (int trial = 0; trial < 20; ++trial) {
    const CMatrix m = testutil::random_antihermitian(5, 0.5 + 2.5 * trial / 20.0, g);
    const CMatrix u = expm_antihermitian(m);
    CHECK(unitarity_defect(u) < 1e-12);
    CHECK((u - testutil::oracle_expm(m)).norm() < 1e-12);
  }
  CHECK_THROWS_AS(expm_antihermitian(CMatrix::Identity(2, 2)), InvalidArgument);
}

TEST_CASE("spectral norm") {
  CMatrix d = CMatrix::Zero(3, 3);
  d.diagonal() << 0.0, 0.5159, 1.0;
  CHECK(std::abs(spectral_norm(d) - 1.0) < 1e-12);
  CHECK(std::abs(spectral_norm(testutil::sigma_x()) - 1.0) < 1e-12);
  CHECK(spectral_norm(CMatrix::Zero(2, 2)) == 0.0);

  std::mt19937_64 g(2);
  std::normal_distribution<double> n;
  for (int trial = 0; trial < 20; ++trial) {
    CMatrix a(5, 5);
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) a(i, j) = Complex(n(g), n(g));
    Eigen::JacobiSVD<CMatrix> svd(a);
    const double ref = svd.singularValues()(0);
    CHECK(std::abs(spectral_norm(a) - ref) <= 1e-9 * ref);
  }
}

TEST_CASE("propagation: constant control is a single exponential") {
  const ProblemSpec spec = ibm_spec(0.5, 1);
  const std::vector<double> x{0.37};
  const Propagation p = propagate_reference(spec, x);
  const CMatrix ref = testutil::oracle_expm(-I1 * 0.5 * (spec.h0() + 0.37 * spec.hc()));
  CHECK((p.unitary - ref).norm() < 1e-11);
}

TEST_CASE("propagation: second order self-convergence") {
  const ProblemSpec spec = ibm_spec(0.5, 3);
  const std::vector<double> x{0.8, -0.9, 0.7};
  const CMatrix u1 = propagate_midpoint(spec, x, 16).unitary;
  const CMatrix u2 = propagate_midpoint(spec, x, 32).unitary;
  const CMatrix u3 = propagate_midpoint(spec, x, 64).unitary;
  const double ratio = (u1 - u2).norm() / (u2 - u3).norm();
  CHECK(ratio == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("propagation: default reference meets its doubling tolerance") {
  const ProblemSpec spec = ibm_spec(0.5, 3);
  std::mt19937_64 g(4);
  for (int trial = 0; trial < 3; ++trial) {
    const auto x = testutil::random_point(3, g);
    const Propagation p = propagate_reference(spec, x);
    CHECK(p.defect <= kPropagationTolerance);
    CHECK(unitarity_defect(p.unitary) < 1e-11);
  }
}

TEST_CASE("propagation: tolerance violation is reported") {
  const ProblemSpec spec = ibm_spec(0.5, 3);
  const std::vector<double> x{1.0, 1.0, 1.0};
  CHECK_THROWS_AS(propagate_reference(spec, x, kMaxPropagationSteps / 2, 1e-30), NumericalFailure);
  CHECK_THROWS_AS(propagate_midpoint(spec, std::vector{1.0}, 8), InvalidArgument);
}

TEST_CASE("propagation: piecewise specs use exact slice products") {
  const ProblemSpec spec = ibm_spec(0.6, 3, true);
  const std::vector<double> x{0.4, -0.7, 0.1};
  CMatrix ref = CMatrix::Identity(3, 3);
  for (double xi : x) ref = testutil::oracle_expm(-I1 * 0.2 * (spec.h0() + xi * spec.hc())) * ref;
  CHECK((propagate_reference(spec, x).unitary - ref).norm() < 1e-13);
}

TEST_CASE("action integral") {
  const ProblemSpec spec = ibm_spec(0.5, 3);
  CHECK(std::abs(action_integral(spec, std::vector{0.0, 0.0, 0.0}) - 0.5) < 1e-10);

  const ProblemSpec c1 = ibm_spec(0.5, 1);
  const double ref = 0.5 * spectral_norm(c1.h0() + 0.6 * c1.hc(), 1e-14);
  CHECK(std::abs(action_integral(c1, std::vector{0.6}) - ref) < 1e-10);

  std::mt19937_64 g(6);
  for (int trial = 0; trial < 2; ++trial) {
    const auto x = testutil::random_point(3, g);
    // midpoint Riemann sum on 1e5 cells with an independent SVD
    const int n = 100000;
    double sum = 0.0;
    for (int k = 0; k < n; ++k) {
      const double t = (k + 0.5) * 0.5 / n;
      Eigen::SelfAdjointEigenSolver<CMatrix> es(spec.hamiltonian(x, t), Eigen::EigenvaluesOnly);
      sum += es.eigenvalues().cwiseAbs().maxCoeff();
    }
    sum *= 0.5 / n;
    CHECK(std::abs(action_integral(spec, x) - sum) < 1e-7);
    CHECK(action_integral(spec.with_horizon(1.0), x) >= action_integral(spec, x));
  }
}
