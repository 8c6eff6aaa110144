#include "gatesynth/magnus.hpp"

#include <string>

#include "gatesynth/errors.hpp"

namespace gatesynth {

namespace {

void require_poly_control(const ProblemSpec& spec) {
  if (spec.is_piecewise()) {
    throw InvalidArgument("Magnus construction needs a polynomial-control spec; use build_sigma");
  }
}

}  // namespace

PolyMatrix build_generator(const ProblemSpec& spec, Ring ring, int time_index) {
  require_poly_control(spec);
  const int m = spec.control_count();
  if (ring.controls() != m) throw ContextMismatch("generator ring must have one slot per control");
  if (time_index < 1 || time_index > ring.times()) throw InvalidArgument("time index outside ring");

  // E(t) = sum_k x_k t^k
  Polynomial control(ring);
  for (int k = 0; k < m; ++k) {
    Monomial mono = Monomial::unit(k);
    if (k > 0) mono.set(ring.time_slot(time_index), k);
    control.add_term(mono, 1.0);
  }
  const Complex minus_i(0.0, -1.0);
  return PolyMatrix::from_numeric(ring, minus_i * spec.h0()) +
         PolyMatrix::from_numeric(minus_i * spec.hc(), control);
}

PolyMatrix magnus_term(const ProblemSpec& spec, int k) {
  require_poly_control(spec);
  const int m = spec.control_count();
  const double horizon = spec.horizon();
  switch (k) {
    case 1: {
      const Ring ring(m, 1);
      return simplex_integrate(build_generator(spec, ring, 1), horizon);
    }
    case 2: {
      const Ring ring(m, 2);
      const PolyMatrix a1 = build_generator(spec, ring, 1);
      const PolyMatrix a2 = build_generator(spec, ring, 2);
      return simplex_integrate(commutator(a1, a2), horizon) * Complex(0.5);
    }
    case 3: {
      const Ring ring(m, 3);
      const PolyMatrix a1 = build_generator(spec, ring, 1);
      const PolyMatrix a2 = build_generator(spec, ring, 2);
      const PolyMatrix a3 = build_generator(spec, ring, 3);
      const PolyMatrix integrand = commutator(a1, commutator(a2, a3)) - commutator(a3, commutator(a1, a2));
      return simplex_integrate(integrand, horizon) * Complex(1.0 / 6.0);
    }
    default:
      throw InvalidArgument("Magnus term index must be 1, 2 or 3, got " + std::to_string(k));
  }
}

PolyMatrix build_lambda(const ProblemSpec& spec, int order) {
  if (order < 1 || order > 3) throw InvalidArgument("Magnus order must be 1, 2 or 3");
  PolyMatrix lambda = magnus_term(spec, 1);
  for (int k = 2; k <= order; ++k) lambda += magnus_term(spec, k);
  return lambda;
}

}  // namespace gatesynth
