#include "gatesynth/polymat.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gatesynth/errors.hpp"

namespace gatesynth {

Ring::Ring(int controls, int times) : controls_(controls), times_(times) {
  if (controls < 0 || times < 0 || controls + times > kMaxSlots) {
    throw InvalidArgument("ring needs 0 <= controls + times <= " + std::to_string(kMaxSlots) +
                          ", got " + std::to_string(controls) + " + " + std::to_string(times));
  }
}

// ---------------------------------------------------------------------------
// Monomial

Monomial Monomial::unit(int slot, int power) {
  Monomial m;
  m.set(slot, power);
  return m;
}

void Monomial::set(int slot, int power) {
  if (slot < 0 || slot >= kMaxSlots) throw InvalidArgument("monomial slot out of range");
  if (power < 0 || power > 255) throw InvalidArgument("monomial exponent out of range");
  exps_[static_cast<std::size_t>(slot)] = static_cast<std::uint8_t>(power);
}

int Monomial::degree() const { return degree(0, kMaxSlots); }

int Monomial::degree(int first, int last) const {
  int total = 0;
  for (int s = first; s < last; ++s) total += exps_[static_cast<std::size_t>(s)];
  return total;
}

Monomial Monomial::operator*(const Monomial& other) const {
  Monomial out;
  for (std::size_t s = 0; s < exps_.size(); ++s) {
    const int e = exps_[s] + other.exps_[s];
    if (e > 255) throw InvalidArgument("monomial exponent overflow");
    out.exps_[s] = static_cast<std::uint8_t>(e);
  }
  return out;
}

bool GrlexLess::operator()(const Monomial& a, const Monomial& b) const {
  const int da = a.degree();
  const int db = b.degree();
  if (da != db) return da < db;
  for (int s = 0; s < kMaxSlots; ++s) {
    if (a[s] != b[s]) return a[s] < b[s];
  }
  return false;
}

// ---------------------------------------------------------------------------
// Polynomial

Polynomial Polynomial::constant(Ring ring, Complex value) {
  Polynomial p(ring);
  p.add_term(Monomial{}, value);
  return p;
}

Polynomial Polynomial::variable(Ring ring, int slot, Complex coeff) {
  if (slot < 0 || slot >= ring.arity()) throw InvalidArgument("variable slot outside ring");
  Polynomial p(ring);
  p.add_term(Monomial::unit(slot), coeff);
  return p;
}

Polynomial Polynomial::term(Ring ring, const Monomial& mono, Complex coeff) {
  for (int s = ring.arity(); s < kMaxSlots; ++s) {
    if (mono[s] != 0) throw InvalidArgument("monomial uses a slot outside the ring");
  }
  Polynomial p(ring);
  p.add_term(mono, coeff);
  return p;
}

int Polynomial::degree() const {
  int d = -1;
  for (const auto& [mono, c] : terms_) d = std::max(d, mono.degree());
  return d;
}

int Polynomial::control_degree() const {
  int d = -1;
  for (const auto& [mono, c] : terms_) d = std::max(d, mono.degree(0, ring_.controls()));
  return d;
}

Complex Polynomial::coefficient(const Monomial& mono) const {
  const auto it = terms_.find(mono);
  return it == terms_.end() ? Complex{} : it->second;
}

void Polynomial::add_term(const Monomial& mono, Complex coeff) {
  auto [it, inserted] = terms_.try_emplace(mono, coeff);
  if (!inserted) it->second += coeff;
  if (std::abs(it->second) < kPruneThreshold) terms_.erase(it);
}

void Polynomial::require_same_ring(const Polynomial& other) const {
  if (!(ring_ == other.ring_)) {
    throw ContextMismatch("polynomial ring mismatch: (" + std::to_string(ring_.controls()) + "," +
                          std::to_string(ring_.times()) + ") vs (" +
                          std::to_string(other.ring_.controls()) + "," +
                          std::to_string(other.ring_.times()) + ")");
  }
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  require_same_ring(other);
  for (const auto& [mono, c] : other.terms_) add_term(mono, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
  require_same_ring(other);
  for (const auto& [mono, c] : other.terms_) add_term(mono, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(Complex scale) {
  for (auto it = terms_.begin(); it != terms_.end();) {
    it->second *= scale;
    if (std::abs(it->second) < kPruneThreshold) {
      it = terms_.erase(it);
    } else {
      ++it;
    }
  }
  return *this;
}

Polynomial operator*(const Polynomial& p, const Polynomial& q) {
  p.require_same_ring(q);
  Polynomial out(p.ring_);
  for (const auto& [ma, ca] : p.terms_) {
    for (const auto& [mb, cb] : q.terms_) {
      auto [it, inserted] = out.terms_.try_emplace(ma * mb, ca * cb);
      if (!inserted) it->second += ca * cb;
    }
  }
  std::erase_if(out.terms_, [](const auto& kv) { return std::abs(kv.second) < kPruneThreshold; });
  return out;
}

Polynomial Polynomial::operator-() const {
  Polynomial out(*this);
  for (auto& [mono, c] : out.terms_) c = -c;
  return out;
}

Polynomial Polynomial::derivative(int slot) const {
  if (slot < 0 || slot >= ring_.arity()) throw InvalidArgument("derivative slot outside ring");
  Polynomial out(ring_);
  for (const auto& [mono, c] : terms_) {
    const int e = mono[slot];
    if (e == 0) continue;
    Monomial reduced = mono;
    reduced.set(slot, e - 1);
    out.add_term(reduced, c * static_cast<double>(e));
  }
  return out;
}

Polynomial Polynomial::conjugate() const {
  Polynomial out(*this);
  for (auto& [mono, c] : out.terms_) c = std::conj(c);
  return out;
}

double Polynomial::max_imag() const {
  double m = 0.0;
  for (const auto& [mono, c] : terms_) m = std::max(m, std::abs(c.imag()));
  return m;
}

// ---------------------------------------------------------------------------
// PolyMatrix

PolyMatrix::PolyMatrix(Ring ring, int dim)
    : ring_(ring), dim_(dim), entries_(static_cast<std::size_t>(dim * dim), Polynomial(ring)) {
  if (dim < 0) throw InvalidArgument("negative matrix dimension");
}

PolyMatrix PolyMatrix::identity(Ring ring, int dim) {
  PolyMatrix out(ring, dim);
  for (int i = 0; i < dim; ++i) out.set(i, i, Polynomial::constant(ring, 1.0));
  return out;
}

PolyMatrix PolyMatrix::from_numeric(const CMatrix& values, const Polynomial& factor) {
  if (values.rows() != values.cols()) throw DimensionMismatch("numeric matrix is not square");
  const int d = static_cast<int>(values.rows());
  PolyMatrix out(factor.ring(), d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      if (values(i, j) != Complex{}) out.entries_[out.index(i, j)] = factor * values(i, j);
    }
  }
  return out;
}

PolyMatrix PolyMatrix::from_numeric(Ring ring, const CMatrix& values) {
  return from_numeric(values, Polynomial::constant(ring, 1.0));
}

void PolyMatrix::set(int i, int j, Polynomial value) {
  if (!(value.ring() == ring_)) throw ContextMismatch("entry ring differs from matrix ring");
  if (i < 0 || j < 0 || i >= dim_ || j >= dim_) throw DimensionMismatch("entry index out of range");
  entries_[index(i, j)] = std::move(value);
}

bool PolyMatrix::is_zero() const {
  return std::all_of(entries_.begin(), entries_.end(), [](const Polynomial& p) { return p.is_zero(); });
}

int PolyMatrix::degree() const {
  int d = -1;
  for (const auto& p : entries_) d = std::max(d, p.degree());
  return d;
}

int PolyMatrix::control_degree() const {
  int d = -1;
  for (const auto& p : entries_) d = std::max(d, p.control_degree());
  return d;
}

std::size_t PolyMatrix::max_terms() const {
  std::size_t n = 0;
  for (const auto& p : entries_) n = std::max(n, p.size());
  return n;
}

void PolyMatrix::require_compatible(const PolyMatrix& other) const {
  if (dim_ != other.dim_) {
    throw DimensionMismatch("matrix dimension mismatch: " + std::to_string(dim_) + " vs " +
                            std::to_string(other.dim_));
  }
  if (!(ring_ == other.ring_)) throw ContextMismatch("matrix ring mismatch");
}

PolyMatrix& PolyMatrix::operator+=(const PolyMatrix& other) {
  require_compatible(other);
  for (std::size_t k = 0; k < entries_.size(); ++k) entries_[k] += other.entries_[k];
  return *this;
}

PolyMatrix& PolyMatrix::operator-=(const PolyMatrix& other) {
  require_compatible(other);
  for (std::size_t k = 0; k < entries_.size(); ++k) entries_[k] -= other.entries_[k];
  return *this;
}

PolyMatrix& PolyMatrix::operator*=(Complex scale) {
  for (auto& p : entries_) p *= scale;
  return *this;
}

PolyMatrix operator*(const PolyMatrix& a, const PolyMatrix& b) {
  a.require_compatible(b);
  const int d = a.dim_;
  PolyMatrix out(a.ring_, d);
  for (int i = 0; i < d; ++i) {
    for (int k = 0; k < d; ++k) {
      const Polynomial& aik = a(i, k);
      if (aik.is_zero()) continue;
      for (int j = 0; j < d; ++j) {
        const Polynomial& bkj = b(k, j);
        if (bkj.is_zero()) continue;
        out.entries_[out.index(i, j)] += aik * bkj;
      }
    }
  }
  return out;
}

PolyMatrix commutator(const PolyMatrix& a, const PolyMatrix& b) { return a * b - b * a; }

// ---------------------------------------------------------------------------
// Evaluation

namespace {

std::vector<double> slot_values(const Ring& ring, std::span<const double> x, std::span<const double> t) {
  if (static_cast<int>(x.size()) != ring.controls()) {
    throw InvalidArgument("expected " + std::to_string(ring.controls()) + " control values, got " +
                          std::to_string(x.size()));
  }
  if (static_cast<int>(t.size()) != ring.times()) {
    throw InvalidArgument(ring.times() > 0 && t.empty()
                              ? "polynomial has residual time slots"
                              : "time value count does not match the ring");
  }
  std::vector<double> v(x.begin(), x.end());
  v.insert(v.end(), t.begin(), t.end());
  return v;
}

Complex eval_terms(const Polynomial& p, const std::vector<double>& v) {
  Complex sum{};
  for (const auto& [mono, c] : p.terms()) {
    double m = 1.0;
    for (std::size_t s = 0; s < v.size(); ++s) {
      for (int e = mono[static_cast<int>(s)]; e > 0; --e) m *= v[s];
    }
    sum += c * m;
  }
  return sum;
}

}  // namespace

Complex evaluate(const Polynomial& p, std::span<const double> x, std::span<const double> t) {
  return eval_terms(p, slot_values(p.ring(), x, t));
}

CMatrix evaluate(const PolyMatrix& a, std::span<const double> x, std::span<const double> t) {
  const auto v = slot_values(a.ring(), x, t);
  CMatrix out(a.dim(), a.dim());
  for (int i = 0; i < a.dim(); ++i) {
    for (int j = 0; j < a.dim(); ++j) out(i, j) = eval_terms(a(i, j), v);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Simplex integration

Polynomial simplex_integrate(const Polynomial& p, double horizon) {
  const Ring& ring = p.ring();
  const int k = ring.times();
  if (k == 0) throw InvalidArgument("simplex_integrate needs at least one time slot");
  if (!(horizon > 0.0)) throw InvalidArgument("integration horizon must be positive");

  Polynomial out(ring.without_times());
  for (const auto& [mono, c] : p.terms()) {
    // Innermost t_k first: int_0^{t_{j-1}} t_j^e dt_j = t_{j-1}^{e+1} / (e+1).
    double factor = 1.0;
    int carried = 0;
    for (int j = k; j >= 1; --j) {
      const int e = mono[ring.time_slot(j)] + carried;
      factor /= static_cast<double>(e + 1);
      carried = e + 1;
    }
    factor *= std::pow(horizon, carried);

    Monomial controls_only;
    for (int s = 0; s < ring.controls(); ++s) controls_only.set(s, mono[s]);
    out.add_term(controls_only, c * factor);
  }
  return out;
}

PolyMatrix simplex_integrate(const PolyMatrix& a, double horizon) {
  return a.map_entries(a.ring().without_times(),
                       [horizon](const Polynomial& p) { return simplex_integrate(p, horizon); });
}

Polynomial frobenius_sq(const PolyMatrix& a) {
  if (a.ring().times() != 0) throw InvalidArgument("frobenius_sq needs a matrix without time slots");
  Polynomial sum(a.ring());
  for (int i = 0; i < a.dim(); ++i) {
    for (int j = 0; j < a.dim(); ++j) sum += a(i, j) * a(i, j).conjugate();
  }
  Polynomial real(a.ring());
  for (const auto& [mono, c] : sum.terms()) {
    if (std::abs(c.imag()) > 1e-13 * std::max(1.0, std::abs(c.real()))) {
      throw NumericalFailure("frobenius_sq produced a non-real coefficient (imag " +
                             std::to_string(c.imag()) + ")");
    }
    real.add_term(mono, c.real());
  }
  return real;
}

}  // namespace gatesynth
