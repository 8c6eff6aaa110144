#include "gatesynth/bch.hpp"

#include <string>

#include "gatesynth/errors.hpp"

namespace gatesynth {

GradedMatrix::GradedMatrix(Ring ring, int dim, int max_grade) {
  if (max_grade < 1 || max_grade > kMaxBchOrder) {
    throw InvalidArgument("BCH order must lie in 1.." + std::to_string(kMaxBchOrder));
  }
  parts_.assign(static_cast<std::size_t>(max_grade), PolyMatrix(ring, dim));
}

GradedMatrix GradedMatrix::homogeneous(const PolyMatrix& a, int grade, int max_grade) {
  GradedMatrix out(a.ring(), a.dim(), max_grade);
  if (grade <= max_grade) out.grade(grade) = a;
  return out;
}

PolyMatrix GradedMatrix::total() const {
  PolyMatrix sum = parts_.front();
  for (std::size_t g = 1; g < parts_.size(); ++g) sum += parts_[g];
  return sum;
}

GradedMatrix& GradedMatrix::operator+=(const GradedMatrix& other) {
  if (other.max_grade() != max_grade()) throw InvalidArgument("graded operands differ in max grade");
  for (std::size_t g = 0; g < parts_.size(); ++g) parts_[g] += other.parts_[g];
  return *this;
}

GradedMatrix& GradedMatrix::operator*=(Complex scale) {
  for (auto& p : parts_) p *= scale;
  return *this;
}

GradedMatrix graded_commutator(const GradedMatrix& a, const GradedMatrix& b) {
  const int n = a.max_grade();
  if (b.max_grade() != n) throw InvalidArgument("graded operands differ in max grade");
  GradedMatrix out(a.grade(1).ring(), a.grade(1).dim(), n);
  for (int ga = 1; ga < n; ++ga) {
    if (a.grade(ga).is_zero()) continue;
    for (int gb = 1; ga + gb <= n; ++gb) {
      if (b.grade(gb).is_zero()) continue;
      out.grade(ga + gb) += commutator(a.grade(ga), b.grade(gb));
    }
  }
  return out;
}

GradedMatrix bch_compose(const GradedMatrix& x, const GradedMatrix& y) {
  const int n = x.max_grade();
  GradedMatrix z = x;
  z += y;
  if (n < 2) return z;

  const GradedMatrix xy = graded_commutator(x, y);
  GradedMatrix half = xy;
  z += (half *= 0.5);
  if (n < 3) return z;

  // 1/12 ([X,[X,Y]] - [Y,[X,Y]])
  GradedMatrix x_xy = graded_commutator(x, xy);
  GradedMatrix y_xy = graded_commutator(y, xy);
  z += (x_xy *= 1.0 / 12.0);
  z += (y_xy *= -1.0 / 12.0);
  if (n < 4) return z;

  // -1/24 [Y,[X,[X,Y]]]
  GradedMatrix quartic = graded_commutator(y, graded_commutator(x, xy));
  z += (quartic *= -1.0 / 24.0);
  return z;
}

PolyMatrix bch_compose(const PolyMatrix& x, const PolyMatrix& y, int order) {
  if (order < 1 || order > kMaxBchOrder) {
    throw InvalidArgument("BCH order must lie in 1.." + std::to_string(kMaxBchOrder));
  }
  return bch_compose(GradedMatrix::homogeneous(x, 1, order), GradedMatrix::homogeneous(y, 1, order))
      .total();
}

PolyMatrix slice_generator(const ProblemSpec& spec, int slice) {
  if (!spec.is_piecewise()) throw InvalidArgument("slice generators need a piecewise-control spec");
  const int m = spec.control_count();
  if (slice < 1 || slice > m) throw InvalidArgument("slice index outside 1..m");
  const Ring ring(m, 0);
  const Complex scale(0.0, -spec.slice_width());
  return PolyMatrix::from_numeric(ring, scale * spec.h0()) +
         PolyMatrix::from_numeric(scale * spec.hc(), Polynomial::variable(ring, slice - 1));
}

PolyMatrix build_sigma(const ProblemSpec& spec, int order) {
  if (order < 1 || order > kMaxBchOrder) {
    throw InvalidArgument("BCH order must lie in 1.." + std::to_string(kMaxBchOrder));
  }
  const int m = spec.control_count();
  GradedMatrix sigma = GradedMatrix::homogeneous(slice_generator(spec, 1), 1, order);
  for (int i = 2; i <= m; ++i) {
    sigma = bch_compose(GradedMatrix::homogeneous(slice_generator(spec, i), 1, order), sigma);
  }
  return sigma.total();
}

PolyMatrix gbchd_eq12(const ProblemSpec& spec, int order) {
  if (order < 1 || order > 3) throw InvalidArgument("gbchd_eq12 is defined only through order 3");
  const int m = spec.control_count();
  std::vector<PolyMatrix> a;
  for (int i = 1; i <= m; ++i) a.push_back(slice_generator(spec, i));
  const auto at = [&a](int i) -> const PolyMatrix& { return a[static_cast<std::size_t>(i - 1)]; };

  PolyMatrix sigma(Ring(m, 0), spec.dim());
  for (int i = 1; i <= m; ++i) sigma += at(i);
  if (order >= 2) {
    PolyMatrix second(sigma.ring(), sigma.dim());
    for (int i = 1; i <= m; ++i) {
      for (int j = 1; j < i; ++j) second += commutator(at(i), at(j));
    }
    sigma += second * Complex(0.5);
  }
  if (order >= 3) {
    PolyMatrix third(sigma.ring(), sigma.dim());
    for (int i = 1; i <= m; ++i) {
      for (int j = 1; j <= i; ++j) {
        for (int k = 1; k <= j; ++k) {
          third += commutator(at(i), commutator(at(j), at(k)));
          third += commutator(at(k), commutator(at(j), at(i)));
        }
      }
    }
    sigma += third * Complex(1.0 / 6.0);
  }
  return sigma;
}

}  // namespace gatesynth
