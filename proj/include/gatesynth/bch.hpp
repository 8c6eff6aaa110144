#pragma once

#include <vector>

#include "gatesynth/polymat.hpp"
#include "gatesynth/problem.hpp"

namespace gatesynth {

inline constexpr int kMaxBchOrder = 4;

/// Matrix split by commutator depth: component g-1 holds the grade-g part.
/// Slice generators are grade 1; a commutator adds the grades of its operands.
class GradedMatrix {
 public:
  GradedMatrix(Ring ring, int dim, int max_grade);
  /// Place `a` entirely in grade `grade`.
  static GradedMatrix homogeneous(const PolyMatrix& a, int grade, int max_grade);

  int max_grade() const { return static_cast<int>(parts_.size()); }
  const PolyMatrix& grade(int g) const { return parts_[static_cast<std::size_t>(g - 1)]; }
  PolyMatrix& grade(int g) { return parts_[static_cast<std::size_t>(g - 1)]; }

  /// Sum over all grades.
  PolyMatrix total() const;

  GradedMatrix& operator+=(const GradedMatrix& other);
  GradedMatrix& operator*=(Complex scale);

 private:
  std::vector<PolyMatrix> parts_;
};

/// [A, B] truncated to grades <= A.max_grade().
GradedMatrix graded_commutator(const GradedMatrix& a, const GradedMatrix& b);

/// log(e^X e^Y) through grade `order` (1..4):
///   X + Y + 1/2 [X,Y] + 1/12 ([X,[X,Y]] + [Y,[Y,X]]) - 1/24 [Y,[X,[X,Y]]]
GradedMatrix bch_compose(const GradedMatrix& x, const GradedMatrix& y);
/// Ungraded entry point: X and Y are each treated as grade 1.
PolyMatrix bch_compose(const PolyMatrix& x, const PolyMatrix& y, int order);

/// Slice generator A_i = dt * (-i)(H0 + x_i Hc), i in 1..m, over Ring(m, 0).
PolyMatrix slice_generator(const ProblemSpec& spec, int slice);

/// Sigma with e^{A_m} ... e^{A_1} = e^Sigma, by right-to-left graded BCH
/// folding truncated at grade `order` (1..4).
PolyMatrix build_sigma(const ProblemSpec& spec, int order);

/// Closed three-term multi-exponential series with a 1/6 third-order weight:
///   sum A_i + 1/2 sum_{j<i} [A_i,A_j]
///     + 1/6 sum_{k<=j<=i} ([A_i,[A_j,A_k]] + [A_k,[A_j,A_i]])
/// truncated at `order` (1..3). Kept for cross-checking build_sigma.
PolyMatrix gbchd_eq12(const ProblemSpec& spec, int order);

}  // namespace gatesynth
