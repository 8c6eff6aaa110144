#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace gatesynth {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;

/// Maximum number of variable slots (controls + time variables) in one ring.
inline constexpr int kMaxSlots = 16;

/// Terms whose coefficient magnitude falls below this are dropped.
inline constexpr double kPruneThreshold = 1e-14;

/// Variable layout of a polynomial ring: control slots x_0..x_{m-1} come
/// first, followed by ordered time slots t_1..t_k (t_1 outermost).
class Ring {
 public:
  Ring() = default;
  Ring(int controls, int times);

  int controls() const { return controls_; }
  int times() const { return times_; }
  int arity() const { return controls_ + times_; }
  /// Slot index of time variable t_j (j is 1-based).
  int time_slot(int j) const { return controls_ + j - 1; }

  Ring without_times() const { return Ring(controls_, 0); }

  bool operator==(const Ring&) const = default;

 private:
  int controls_ = 0;
  int times_ = 0;
};

/// Exponent vector over the slots of a Ring. Unused slots stay zero, so two
/// monomials of the same ring compare slot-for-slot.
class Monomial {
 public:
  Monomial() = default;

  static Monomial unit(int slot, int power = 1);

  int operator[](int slot) const { return exps_[static_cast<std::size_t>(slot)]; }
  void set(int slot, int power);

  int degree() const;
  /// Sum of exponents over slots [first, last).
  int degree(int first, int last) const;

  Monomial operator*(const Monomial& other) const;
  bool operator==(const Monomial&) const = default;

 private:
  std::array<std::uint8_t, kMaxSlots> exps_{};
};

/// Graded lexicographic order: total degree first, then slot 0 dominates.
struct GrlexLess {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

/// Sparse multivariate polynomial with complex coefficients.
///
/// Canonical form: one term per monomial, no coefficient with magnitude below
/// kPruneThreshold. All arithmetic requires both operands to share a Ring and
/// throws ContextMismatch otherwise.
class Polynomial {
 public:
  using TermMap = std::map<Monomial, Complex, GrlexLess>;

  explicit Polynomial(Ring ring = {}) : ring_(ring) {}

  static Polynomial constant(Ring ring, Complex value);
  static Polynomial variable(Ring ring, int slot, Complex coeff = 1.0);
  static Polynomial term(Ring ring, const Monomial& mono, Complex coeff);

  const Ring& ring() const { return ring_; }
  const TermMap& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  /// Total degree; -1 for the zero polynomial.
  int degree() const;
  /// Degree counted over control slots only.
  int control_degree() const;

  Complex coefficient(const Monomial& mono) const;
  void add_term(const Monomial& mono, Complex coeff);

  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator-=(const Polynomial& other);
  Polynomial& operator*=(Complex scale);

  friend Polynomial operator+(Polynomial p, const Polynomial& q) { return p += q; }
  friend Polynomial operator-(Polynomial p, const Polynomial& q) { return p -= q; }
  friend Polynomial operator*(Polynomial p, Complex s) { return p *= s; }
  friend Polynomial operator*(Complex s, Polynomial p) { return p *= s; }
  friend Polynomial operator*(const Polynomial& p, const Polynomial& q);
  Polynomial operator-() const;

  /// Formal partial derivative with respect to one slot.
  Polynomial derivative(int slot) const;
  Polynomial conjugate() const;

  /// Largest |imaginary part| over all coefficients.
  double max_imag() const;

 private:
  void require_same_ring(const Polynomial& other) const;

  Ring ring_;
  TermMap terms_;
};

/// Square matrix of polynomials sharing one Ring.
class PolyMatrix {
 public:
  PolyMatrix() = default;
  PolyMatrix(Ring ring, int dim);

  static PolyMatrix identity(Ring ring, int dim);
  /// Entry-wise `values(i,j) * factor`.
  static PolyMatrix from_numeric(const CMatrix& values, const Polynomial& factor);
  static PolyMatrix from_numeric(Ring ring, const CMatrix& values);

  int dim() const { return dim_; }
  const Ring& ring() const { return ring_; }

  const Polynomial& operator()(int i, int j) const { return entries_[index(i, j)]; }
  void set(int i, int j, Polynomial value);

  bool is_zero() const;
  int degree() const;
  int control_degree() const;
  /// Largest number of terms in any entry.
  std::size_t max_terms() const;

  PolyMatrix& operator+=(const PolyMatrix& other);
  PolyMatrix& operator-=(const PolyMatrix& other);
  PolyMatrix& operator*=(Complex scale);

  friend PolyMatrix operator+(PolyMatrix a, const PolyMatrix& b) { return a += b; }
  friend PolyMatrix operator-(PolyMatrix a, const PolyMatrix& b) { return a -= b; }
  friend PolyMatrix operator*(PolyMatrix a, Complex s) { return a *= s; }
  friend PolyMatrix operator*(Complex s, PolyMatrix a) { return a *= s; }
  friend PolyMatrix operator*(const PolyMatrix& a, const PolyMatrix& b);

  /// Apply `f` to every entry, producing a matrix over `ring`.
  template <typename F>
  PolyMatrix map_entries(Ring ring, F&& f) const {
    PolyMatrix out(ring, dim_);
    for (std::size_t k = 0; k < entries_.size(); ++k) out.entries_[k] = f(entries_[k]);
    return out;
  }

 private:
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(i * dim_ + j); }
  void require_compatible(const PolyMatrix& other) const;

  Ring ring_;
  int dim_ = 0;
  std::vector<Polynomial> entries_;
};

/// AB - BA.
PolyMatrix commutator(const PolyMatrix& a, const PolyMatrix& b);

/// Evaluate at control values `x` and, when the ring carries time slots,
/// time values `t` (size must equal ring().times()).
Complex evaluate(const Polynomial& p, std::span<const double> x, std::span<const double> t = {});
CMatrix evaluate(const PolyMatrix& a, std::span<const double> x, std::span<const double> t = {});

/// Integrate out all time slots over the ordered simplex
/// 0 <= t_k <= ... <= t_1 <= T, innermost variable first.
Polynomial simplex_integrate(const Polynomial& p, double horizon);
PolyMatrix simplex_integrate(const PolyMatrix& a, double horizon);

/// Squared Frobenius norm for real control values, as a real-coefficient
/// polynomial: sum_ij |a_ij(x)|^2.
Polynomial frobenius_sq(const PolyMatrix& a);

}  // namespace gatesynth
