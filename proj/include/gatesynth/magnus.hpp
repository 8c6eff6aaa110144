#pragma once

#include "gatesynth/polymat.hpp"
#include "gatesynth/problem.hpp"

namespace gatesynth {

/// A(t) = -i (H0 + E(t) Hc) over `ring`, with t bound to time variable
/// t_`time_index` (1-based). Requires a polynomial-control spec.
PolyMatrix build_generator(const ProblemSpec& spec, Ring ring, int time_index);

/// k-th Magnus term (k in 1..3) as a matrix over the control slots, with the
/// horizon substituted numerically:
///   Omega_1 = int A(t1)
///   Omega_2 = 1/2  int int [A(t1), A(t2)]
///   Omega_3 = 1/6  int int int [A(t1),[A(t2),A(t3)]] - [A(t3),[A(t1),A(t2)]]
/// over the ordered simplex 0 <= t3 <= t2 <= t1 <= T.
PolyMatrix magnus_term(const ProblemSpec& spec, int k);

/// Truncated series Lambda_n = Omega_1 + ... + Omega_n, n in 1..3.
PolyMatrix build_lambda(const ProblemSpec& spec, int order);

}  // namespace gatesynth
