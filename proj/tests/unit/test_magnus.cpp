#include "doctest.h"

#include <cmath>
#include <random>

#include "gatesynth/errors.hpp"
#include "gatesynth/hamlib.hpp"
#include "gatesynth/magnus.hpp"
#include "gatesynth/numerics.hpp"
#include "gatesynth/objective.hpp"
#include "helpers.hpp"

using namespace gatesynth;
using testutil::I1;

namespace {

ProblemSpec ibm(double T, int m) {
  const SystemPair s = ibmq3();
  return {s.h0, s.hc, T, PolyControl{m}};
}

double magnus_defect(const ProblemSpec& spec, const PolyMatrix& lambda, const std::vector<double>& x) {
  const CMatrix u = propagate_reference(spec, x).unitary;
  return (evaluate(lambda, x) - testutil::oracle_logm(u)).norm();
}

}  // namespace

TEST_CASE("generator assembly") {
  const ProblemSpec spec = ibm(0.5, 3);
  const Ring ring(3, 1);
  const PolyMatrix a = build_generator(spec, ring, 1);
  // entry (0,1): -0.7071 i (x0 + x1 t + x2 t^2)
  const Polynomial& e = a(0, 1);
  CHECK(e.size() == 3);
  Monomial m1 = Monomial::unit(1);
  m1.set(ring.time_slot(1), 1);
  Monomial m2 = Monomial::unit(2);
  m2.set(ring.time_slot(1), 2);
  CHECK(e.coefficient(Monomial::unit(0)) == -0.7071 * I1);
  CHECK(e.coefficient(m1) == -0.7071 * I1);
  CHECK(e.coefficient(m2) == -0.7071 * I1);

  std::mt19937_64 g(1);
  for (int trial = 0; trial < 10; ++trial) {
    const auto x = testutil::random_point(3, g);
    const double t = 0.05 * trial;
    const CMatrix got = evaluate(a, x, std::vector{t});
    CHECK((got - (-I1) * spec.hamiltonian(x, t)).norm() < 1e-14);
  }

  const PolyMatrix a1 = build_generator(ibm(0.5, 1), Ring(1, 1), 1);
  CHECK(a1.degree() == 1);
  CHECK((evaluate(a1, std::vector{0.3}, std::vector{0.9}) - (-I1) * (spec.h0() + 0.3 * spec.hc())).norm() == 0.0);

  const SystemPair s = ibmq3();
  const ProblemSpec pw(s.h0, s.hc, 0.5, PiecewiseControl{2});
  CHECK_THROWS_AS(build_generator(pw, Ring(2, 1), 1), InvalidArgument);
  CHECK_THROWS_AS(build_lambda(pw, 1), InvalidArgument);
}

TEST_CASE("first Magnus term") {
  const double T = 0.5;
  const ProblemSpec spec = ibm(T, 3);
  const PolyMatrix o1 = magnus_term(spec, 1);
  std::mt19937_64 g(2);
  for (int trial = 0; trial < 5; ++trial) {
    const auto x = testutil::random_point(3, g);
    const CMatrix closed = -I1 * (spec.h0() * T + spec.hc() * (x[0] * T + x[1] * T * T / 2 + x[2] * T * T * T / 3));
    CHECK((evaluate(o1, x) - closed).norm() < 1e-14);
    // quadrature of A(t) entry by entry
    CMatrix quad(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const double re = testutil::gauss([&](double t) { return spec.hamiltonian(x, t)(i, j).real(); }, 0, T, 4);
        quad(i, j) = -I1 * re;
      }
    CHECK((evaluate(o1, x) - quad).norm() < 1e-13);
  }
}

TEST_CASE("second Magnus term") {
  const ProblemSpec c = ibm(0.5, 1);
  CHECK(magnus_term(c, 2).is_zero());
  CHECK(magnus_term(c, 3).is_zero());

  // E(t) = x1 t only: Omega_2 = (x1 T^3 / 12) [H0, Hc]
  const double T = 0.8;
  const ProblemSpec spec = ibm(T, 2);
  const PolyMatrix o2 = magnus_term(spec, 2);
  const std::vector<double> x{0.0, 0.65};
  const CMatrix k = spec.h0() * spec.hc() - spec.hc() * spec.h0();
  const CMatrix closed = (x[1] * T * T * T / 12.0) * k;
  CHECK((evaluate(o2, x) - closed).norm() < 1e-14);

  // nested quadrature of (1/2) int_0^T int_0^t1 [A(t1), A(t2)]
  auto a = [&](double t) { return CMatrix(-I1 * spec.hamiltonian(x, t)); };
  CMatrix quad = CMatrix::Zero(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int part = 0; part < 2; ++part) {
        const double v = testutil::gauss(
            [&](double t1) {
              return testutil::gauss(
                  [&](double t2) {
                    const CMatrix c12 = a(t1) * a(t2) - a(t2) * a(t1);
                    return part == 0 ? c12(i, j).real() : c12(i, j).imag();
                  },
                  0.0, t1, 4);
            },
            0.0, T, 4);
        quad(i, j) += part == 0 ? Complex(0.5 * v, 0) : Complex(0, 0.5 * v);
      }
  CHECK((evaluate(o2, x) - quad).norm() < 1e-13);
  CHECK_THROWS_AS(magnus_term(spec, 4), InvalidArgument);
  CHECK_THROWS_AS(magnus_term(spec, 0), InvalidArgument);
}

TEST_CASE("lambda structure") {
  const double T = 0.5;
  const ProblemSpec c = ibm(T, 1);
  const CMatrix ref = -I1 * T * (c.h0() + 0.4 * c.hc());
  CHECK((evaluate(build_lambda(c, 1), std::vector{0.4}) - ref).norm() < 1e-14);
  CHECK((evaluate(build_lambda(c, 3), std::vector{0.4}) - ref).norm() < 1e-14);

  const ProblemSpec spec = ibm(T, 3);
  for (int k = 1; k <= 3; ++k) CHECK(magnus_term(spec, k).degree() <= k);
  for (int n = 1; n <= 3; ++n) {
    const PolyMatrix l = build_lambda(spec, n);
    CHECK(l.degree() <= n);
    std::mt19937_64 g(static_cast<unsigned>(n));
    for (int trial = 0; trial < 100; ++trial) {
      const CMatrix v = evaluate(l, testutil::random_point(3, g));
      CHECK((v + v.adjoint()).norm() < 1e-12);
    }
  }
  // single control channel: [Hc,[Hc,Hc]] = 0 caps Lambda_3 at degree 2 in x
  CHECK(build_lambda(spec, 3).degree() == 2);
}

TEST_CASE("third order accuracy in amplitude") {
  // Scaling H by s: remainder after Omega_3 is O(s^4), so halving s shrinks the defect ~16x.
  const SystemPair sys = ibmq3();
  std::mt19937_64 g(7);
  for (int trial = 0; trial < 5; ++trial) {
    const auto x = testutil::random_point(3, g);
    double prev = 0.0;
    for (int level = 0; level < 3; ++level) {
      const double s = 1.0 / (1 << level);
      const ProblemSpec spec(s * sys.h0, s * sys.hc, 0.5, PolyControl{3});
      const double d = magnus_defect(spec, build_lambda(spec, 3), x);
      if (level > 0) {
        CHECK(prev / d > 13.0);
        CHECK(prev / d < 19.0);
      }
      prev = d;
    }
  }
}

TEST_CASE("lambda orders improve against the propagation oracle") {
  const ProblemSpec spec = ibm(0.5, 3);
  std::mt19937_64 g(8);
  for (int trial = 0; trial < 5; ++trial) {
    const auto x = testutil::random_point(3, g);
    const double d1 = magnus_defect(spec, build_lambda(spec, 1), x);
    const double d2 = magnus_defect(spec, build_lambda(spec, 2), x);
    const double d3 = magnus_defect(spec, build_lambda(spec, 3), x);
    CHECK(d2 < d1);
    CHECK(d3 < d2);
    CHECK(d3 < 1e-4);
  }
}
