#include "gatesynth/pop.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <limits>
#include <random>
#include <thread>

#include "gatesynth/errors.hpp"

namespace gatesynth {

// ---------------------------------------------------------------------------
// CompiledPolynomial

CompiledPolynomial::CompiledPolynomial(const Polynomial& p) : vars_(p.ring().controls()) {
  if (p.ring().times() != 0) throw InvalidArgument("polynomial still carries time slots");
  double largest = 0.0;
  for (const auto& [mono, c] : p.terms()) largest = std::max(largest, std::abs(c));
  for (const auto& [mono, c] : p.terms()) {
    if (std::abs(c.imag()) > 1e-12 * std::max(1.0, largest)) {
      throw InvalidArgument("objective polynomial has a complex coefficient");
    }
    for (int s = 0; s < vars_; ++s) exps_.push_back(static_cast<std::uint8_t>(mono[s]));
    coeffs_.push_back(c.real());
    degree_ = std::max(degree_, mono.degree());
  }
}

double CompiledPolynomial::operator()(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != vars_) throw InvalidArgument("evaluation point has the wrong arity");
  double sum = 0.0;
  const std::uint8_t* e = exps_.data();
  for (double c : coeffs_) {
    double term = c;
    for (int s = 0; s < vars_; ++s, ++e) {
      for (int k = *e; k > 0; --k) term *= x[static_cast<std::size_t>(s)];
    }
    sum += term;
  }
  return sum;
}

// ---------------------------------------------------------------------------
// Relaxation

namespace {

void enumerate_monomials(int vars, int max_degree, int slot, Monomial current, int used,
                         std::vector<Monomial>& out) {
  if (slot == vars) {
    out.push_back(current);
    return;
  }
  for (int e = 0; e + used <= max_degree; ++e) {
    current.set(slot, e);
    enumerate_monomials(vars, max_degree, slot + 1, current, used + e, out);
  }
}

double monomial_value(const Monomial& mono, std::span<const double> u) {
  double v = 1.0;
  for (std::size_t s = 0; s < u.size(); ++s) {
    for (int k = mono[static_cast<int>(s)]; k > 0; --k) v *= u[s];
  }
  return v;
}

}  // namespace

RelaxedProblem moment_relax(const Polynomial& p, double radius, int order) {
  if (p.ring().times() != 0) throw InvalidArgument("moment_relax: polynomial has time slots");
  const int m = p.ring().controls();
  if (m < 1) throw InvalidArgument("moment_relax: polynomial has no variables");
  if (!(radius > 0.0)) throw InvalidArgument("moment_relax: ball radius must be positive");
  const int degree = std::max(0, p.degree());
  if (order < 1 || 2 * order < degree) {
    throw InvalidArgument("moment_relax: relaxation order " + std::to_string(order) +
                          " too low for degree " + std::to_string(degree));
  }
  CompiledPolynomial check(p);  // rejects complex coefficients

  RelaxedProblem out;
  MomentRelaxation& r = out.relaxation;
  r.variables = m;
  r.order = order;
  r.radius = radius;
  enumerate_monomials(m, 2 * order, 0, Monomial{}, 0, r.moments);
  std::sort(r.moments.begin(), r.moments.end(), GrlexLess{});
  for (std::size_t k = 0; k < r.moments.size(); ++k) r.index.emplace(r.moments[k], static_cast<int>(k));
  const auto count_upto = [&r](int deg) {
    return static_cast<int>(std::count_if(r.moments.begin(), r.moments.end(),
                                          [deg](const Monomial& mono) { return mono.degree() <= deg; }));
  };
  r.basis_size = count_upto(order);
  const bool ball = std::isfinite(radius);
  r.localizing_size = ball ? count_upto(order - 1) : 0;

  // Scaled objective p(R u) / s.
  const double coord = r.coordinate_scale();
  std::vector<double> coeff(r.moments.size(), 0.0);
  double largest = 0.0;
  for (const auto& [mono, c] : p.terms()) {
    const double v = c.real() * std::pow(coord, mono.degree());
    coeff[static_cast<std::size_t>(r.index.at(mono))] = v;
    largest = std::max(largest, std::abs(v));
  }
  r.objective_scale = largest > 0.0 ? largest : 1.0;
  for (double& v : coeff) v /= r.objective_scale;
  r.constant_term = coeff[0];

  SDPProblem& sdp = out.sdp;
  sdp.block_sizes = {r.basis_size};
  if (ball) sdp.block_sizes.push_back(r.localizing_size);
  const std::size_t n_constraints = r.moments.size() - 1;
  sdp.constraints.assign(n_constraints, {});
  sdp.rhs = Eigen::VectorXd::Map(coeff.data() + 1, static_cast<Eigen::Index>(n_constraints));
  sdp.cost.push_back({0, 0, 0, 1.0});

  for (int i = 0; i < r.basis_size; ++i) {
    for (int j = i; j < r.basis_size; ++j) {
      const int alpha = r.index.at(r.moments[static_cast<std::size_t>(i)] * r.moments[static_cast<std::size_t>(j)]);
      if (alpha == 0) continue;
      sdp.constraints[static_cast<std::size_t>(alpha - 1)].push_back({0, i, j, 1.0});
    }
  }
  if (ball) {
    // g(u) = 1 - sum_k u_k^2
    std::vector<std::pair<Monomial, double>> g{{Monomial{}, 1.0}};
    for (int k = 0; k < m; ++k) g.emplace_back(Monomial::unit(k, 2), -1.0);
    sdp.cost.push_back({1, 0, 0, 1.0});
    for (int i = 0; i < r.localizing_size; ++i) {
      for (int j = i; j < r.localizing_size; ++j) {
        const Monomial base = r.moments[static_cast<std::size_t>(i)] * r.moments[static_cast<std::size_t>(j)];
        for (const auto& [delta, gv] : g) {
          const int alpha = r.index.at(base * delta);
          if (alpha == 0) continue;
          sdp.constraints[static_cast<std::size_t>(alpha - 1)].push_back({1, i, j, gv});
        }
      }
    }
  }
  return out;
}

Eigen::VectorXd moment_vector(const MomentRelaxation& relax, const SDPSolution& solution) {
  Eigen::VectorXd z(static_cast<Eigen::Index>(relax.moments.size()));
  z(0) = 1.0;
  z.tail(z.size() - 1) = -solution.y;
  return z;
}

Eigen::VectorXd point_moments(const MomentRelaxation& relax, std::span<const double> x) {
  if (static_cast<int>(x.size()) != relax.variables) throw InvalidArgument("point has the wrong arity");
  std::vector<double> u(x.begin(), x.end());
  for (double& v : u) v /= relax.coordinate_scale();
  Eigen::VectorXd z(static_cast<Eigen::Index>(relax.moments.size()));
  for (std::size_t k = 0; k < relax.moments.size(); ++k) z(static_cast<Eigen::Index>(k)) = monomial_value(relax.moments[k], u);
  return z;
}

Eigen::MatrixXd moment_matrix(const MomentRelaxation& relax, const Eigen::VectorXd& z) {
  const int n = relax.basis_size;
  Eigen::MatrixXd mm(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const int alpha = relax.index.at(relax.moments[static_cast<std::size_t>(i)] * relax.moments[static_cast<std::size_t>(j)]);
      mm(i, j) = mm(j, i) = z(alpha);
    }
  }
  return mm;
}

double relaxation_bound(const MomentRelaxation& relax, const SDPSolution& solution) {
  double lambda = relax.constant_term - solution.primal_value;
  if (relax.has_ball() && solution.primal_residual.size() > 0) lambda -= solution.primal_residual.lpNorm<1>();
  return relax.objective_scale * lambda;
}

std::optional<std::vector<double>> extract_minimizer(const MomentRelaxation& relax, const Eigen::VectorXd& z,
                                                     double rank_tolerance) {
  const Eigen::MatrixXd mm = moment_matrix(relax, z);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(mm, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) return std::nullopt;
  Eigen::VectorXd sv = eig.eigenvalues().cwiseAbs();
  std::sort(sv.data(), sv.data() + sv.size(), std::greater<>());
  if (!(sv(0) > 0.0) || sv(1) / sv(0) >= rank_tolerance) return std::nullopt;
  if (!(z(0) > 0.0)) return std::nullopt;

  std::vector<double> x(static_cast<std::size_t>(relax.variables));
  for (int k = 0; k < relax.variables; ++k) {
    x[static_cast<std::size_t>(k)] = relax.coordinate_scale() * z(relax.index.at(Monomial::unit(k))) / z(0);
  }
  return x;
}

// ---------------------------------------------------------------------------
// Newton polish

std::vector<double> newton_polish(const Polynomial& p, std::span<const double> x0, double radius,
                                  const PolishSettings& settings) {
  const int m = p.ring().controls();
  if (static_cast<int>(x0.size()) != m) throw InvalidArgument("newton_polish: start point has the wrong arity");
  const CompiledPolynomial f(p);
  std::vector<CompiledPolynomial> grad;
  std::vector<CompiledPolynomial> hess;
  for (int i = 0; i < m; ++i) {
    const Polynomial di = p.derivative(i);
    grad.emplace_back(di);
    for (int j = 0; j < m; ++j) hess.emplace_back(di.derivative(j));
  }

  Eigen::VectorXd x = Eigen::VectorXd::Map(x0.data(), m);
  const auto span_of = [](const Eigen::VectorXd& v) { return std::span<const double>(v.data(), static_cast<std::size_t>(v.size())); };
  double fx = f(span_of(x));

  for (int step = 0; step < settings.max_steps; ++step) {
    Eigen::VectorXd g(m);
    for (int i = 0; i < m; ++i) g(i) = grad[static_cast<std::size_t>(i)](span_of(x));
    if (g.norm() <= settings.gradient_tolerance) break;

    Eigen::MatrixXd h(m, m);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) h(i, j) = hess[static_cast<std::size_t>(i * m + j)](span_of(x));
    }
    h = 0.5 * (h + h.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h);
    const Eigen::VectorXd& lam = eig.eigenvalues();
    const double scale = std::max(1e-300, lam.cwiseAbs().maxCoeff());
    const double floor = 1e-10 * scale;
    const bool convex = lam.minCoeff() > floor;
    Eigen::VectorXd shifted = lam;
    if (!convex) shifted = lam.array().abs().max(floor);
    const Eigen::VectorXd dir =
        -(eig.eigenvectors() * (eig.eigenvectors().transpose() * g).cwiseQuotient(shifted));

    // Armijo backtracking; near a nondegenerate minimum accept the pure
    // Newton step, where rounding makes decrease tests meaningless.
    const double slope = g.dot(dir);
    const bool local = convex && dir.norm() < 1e-6 * (1.0 + x.norm());
    double t = 1.0;
    Eigen::VectorXd trial = x + dir;
    double ft = f(span_of(trial));
    if (!local) {
      while (ft > fx + 1e-4 * t * slope && t > 1e-12) {
        t *= 0.5;
        trial = x + t * dir;
        ft = f(span_of(trial));
      }
      if (t <= 1e-12) break;
    }
    x = trial;
    fx = ft;
    if (x.norm() > 2.0 * radius) {
      throw NumericalFailure("newton_polish diverged outside the 2R ball");
    }
  }
  return {x.data(), x.data() + x.size()};
}

// ---------------------------------------------------------------------------
// Low-discrepancy starts

namespace {

constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

double scrambled_radical_inverse(std::uint64_t index, int base, const std::vector<int>& perm) {
  double value = 0.0;
  double weight = 1.0 / base;
  for (int digit = 0; digit < 24; ++digit) {
    const int d = static_cast<int>(index % static_cast<std::uint64_t>(base));
    index /= static_cast<std::uint64_t>(base);
    value += perm[static_cast<std::size_t>(d)] * weight;
    weight /= base;
  }
  return value;
}

}  // namespace

std::vector<std::vector<double>> ball_points(int variables, double radius, int count, std::uint64_t seed) {
  if (variables < 1 || variables > static_cast<int>(std::size(kPrimes))) {
    throw InvalidArgument("ball_points supports 1..16 variables");
  }
  // Fisher-Yates with explicit modulo keeps the permutation identical across
  // standard-library implementations.
  std::mt19937_64 rng(seed);
  std::vector<std::vector<int>> perms;
  for (int k = 0; k < variables; ++k) {
    std::vector<int> perm(static_cast<std::size_t>(kPrimes[k]));
    for (int d = 0; d < kPrimes[k]; ++d) perm[static_cast<std::size_t>(d)] = d;
    for (int d = kPrimes[k] - 1; d > 0; --d) {
      const auto j = static_cast<std::size_t>(rng() % static_cast<std::uint64_t>(d + 1));
      std::swap(perm[static_cast<std::size_t>(d)], perm[j]);
    }
    perms.push_back(std::move(perm));
  }

  std::vector<std::vector<double>> out;
  for (std::uint64_t index = 1; static_cast<int>(out.size()) < count; ++index) {
    std::vector<double> v(static_cast<std::size_t>(variables));
    double norm2 = 0.0;
    for (int k = 0; k < variables; ++k) {
      v[static_cast<std::size_t>(k)] = 2.0 * scrambled_radical_inverse(index, kPrimes[k], perms[static_cast<std::size_t>(k)]) - 1.0;
      norm2 += v[static_cast<std::size_t>(k)] * v[static_cast<std::size_t>(k)];
    }
    if (norm2 > 1.0) continue;
    for (double& c : v) c *= radius;
    out.push_back(std::move(v));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Global minimization

std::string to_string(ExtractionStatus status) {
  switch (status) {
    case ExtractionStatus::rank_one:
      return "rank-1";
    case ExtractionStatus::polished:
      return "polished";
    case ExtractionStatus::failed:
      return "failed";
  }
  return "unknown";
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

struct Candidate {
  std::vector<double> x;
  double value = std::numeric_limits<double>::infinity();
};

bool better(const Candidate& a, const Candidate& b) {
  if (a.value != b.value) return a.value < b.value;
  return std::lexicographical_compare(a.x.begin(), a.x.end(), b.x.begin(), b.x.end());
}

Candidate multi_start(const Polynomial& p, const CompiledPolynomial& f, const MinimizeConfig& cfg, double radius) {
  const auto starts = ball_points(p.ring().controls(), radius, cfg.fallback_starts, cfg.fallback_seed);
  const unsigned workers = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                                           static_cast<unsigned>(starts.size())));
  std::vector<std::future<Candidate>> jobs;
  for (unsigned w = 0; w < workers; ++w) {
    jobs.push_back(std::async(std::launch::async, [&, w] {
      Candidate best;
      for (std::size_t k = w; k < starts.size(); k += workers) {
        Candidate c;
        try {
          c.x = newton_polish(p, starts[k], radius);
        } catch (const NumericalFailure&) {
          continue;
        }
        c.value = f(c.x);
        if (better(c, best)) best = std::move(c);
      }
      return best;
    }));
  }
  Candidate best;
  for (auto& job : jobs) {
    Candidate c = job.get();
    if (!c.x.empty() && better(c, best)) best = std::move(c);
  }
  return best;
}

}  // namespace

double residual_norm_sq(const LeastSquaresForm& form, std::span<const double> x) {
  return (evaluate(form.generator, x) - form.target).squaredNorm();
}

std::vector<double> refine_least_squares(const LeastSquaresForm& form, std::span<const double> x0, int max_steps) {
  const Ring ring = form.generator.ring();
  const int m = ring.controls();
  if (static_cast<int>(x0.size()) != m) throw InvalidArgument("refine_least_squares: start point has the wrong arity");
  if (form.target.rows() != form.generator.dim() || form.target.cols() != form.generator.dim()) {
    throw DimensionMismatch("refine_least_squares: target dimension differs from the generator");
  }
  std::vector<PolyMatrix> partials;
  for (int k = 0; k < m; ++k) {
    partials.push_back(form.generator.map_entries(ring, [k](const Polynomial& e) { return e.derivative(k); }));
  }
  const Eigen::Index n = form.target.size();
  auto stack = [n](const CMatrix& c) {
    Eigen::VectorXd v(2 * n);
    for (Eigen::Index i = 0; i < n; ++i) {
      v(i) = c.data()[i].real();
      v(n + i) = c.data()[i].imag();
    }
    return v;
  };

  std::vector<double> x(x0.begin(), x0.end());
  Eigen::VectorXd r = stack(evaluate(form.generator, x) - form.target);
  double cost = r.squaredNorm();
  double mu = 1e-12;
  for (int step = 0; step < max_steps && cost > 0.0; ++step) {
    Eigen::MatrixXd J(2 * n, m);
    for (int k = 0; k < m; ++k) J.col(k) = stack(evaluate(partials[static_cast<std::size_t>(k)], x));
    const Eigen::MatrixXd JtJ = J.transpose() * J;
    const Eigen::VectorXd g = J.transpose() * r;
    bool accepted = false;
    for (int tries = 0; tries < 12 && !accepted; ++tries) {
      Eigen::MatrixXd A = JtJ;
      A.diagonal().array() += mu * std::max(1.0, JtJ.diagonal().maxCoeff());
      const Eigen::VectorXd dx = -A.ldlt().solve(g);
      std::vector<double> trial = x;
      for (int k = 0; k < m; ++k) trial[static_cast<std::size_t>(k)] += dx(k);
      const Eigen::VectorXd rt = stack(evaluate(form.generator, trial) - form.target);
      const double ct = rt.squaredNorm();
      if (ct < cost) {
        const bool tiny = dx.norm() <= 1e-15 * (1.0 + Eigen::Map<const Eigen::VectorXd>(x.data(), m).norm());
        x = std::move(trial);
        r = rt;
        cost = ct;
        mu = std::max(1e-15, mu * 0.1);
        accepted = true;
        if (tiny) return x;
      } else {
        mu *= 100.0;
      }
    }
    if (!accepted) break;
  }
  return x;
}

SynthesisResult minimize_global(const Polynomial& p, const MinimizeConfig& config) {
  const auto start = Clock::now();
  const CompiledPolynomial f(p);
  const int m = p.ring().controls();
  if (m < 1) throw InvalidArgument("minimize_global: polynomial has no variables");

  SynthesisResult result;
  result.radius = config.radius > 0.0 ? config.radius : std::sqrt(static_cast<double>(m)) * 1.05;
  const int degree = std::max(0, p.degree());
  const int first_order = config.relax_order > 0 ? config.relax_order : std::max(1, (degree + 1) / 2);
  const int last_order = std::max(first_order, config.max_relax_order);
  result.bound = -std::numeric_limits<double>::infinity();

  for (int order = first_order; order <= last_order; ++order) {
    auto t0 = Clock::now();
    const RelaxedProblem relaxed = moment_relax(p, result.radius, order);
    result.timings.relax_ms += ms_since(t0);

    t0 = Clock::now();
    const SDPSolution sol = sdp_solve(relaxed.sdp, config.sdp);
    result.timings.solve_ms += ms_since(t0);
    result.relax_order = order;
    result.sdp_status = sol.status;
    result.sdp_iterations = sol.iterations;
    result.bound = std::max(result.bound, relaxation_bound(relaxed.relaxation, sol));

    t0 = Clock::now();
    const auto extracted = extract_minimizer(relaxed.relaxation, moment_vector(relaxed.relaxation, sol));
    result.timings.extract_ms += ms_since(t0);
    if (!extracted) {
      // larger relaxations are only worse conditioned
      if (sol.status == SDPStatus::numerical_failure) break;
      continue;
    }

    result.status = ExtractionStatus::rank_one;
    result.extracted = *extracted;
    result.extracted_value = f(*extracted);
    result.x = *extracted;
    result.value = result.extracted_value;
    if (config.polish) {
      t0 = Clock::now();
      try {
        auto polished = newton_polish(p, *extracted, result.radius);
        const double v = f(polished);
        if (v <= result.value) {
          result.x = std::move(polished);
          result.value = v;
        }
      } catch (const NumericalFailure&) {
        // keep the extracted point
      }
      result.timings.polish_ms += ms_since(t0);
    }
    break;
  }

  if (result.status != ExtractionStatus::rank_one) {
    const auto t0 = Clock::now();
    Candidate best = multi_start(p, f, config, result.radius);
    result.timings.polish_ms += ms_since(t0);
    if (best.x.empty()) {
      result.status = ExtractionStatus::failed;
      result.x.assign(static_cast<std::size_t>(m), 0.0);
      result.value = f(result.x);
    } else {
      result.status = ExtractionStatus::polished;
      result.x = std::move(best.x);
      result.value = best.value;
    }
  }
  if (config.least_squares && result.status != ExtractionStatus::failed) {
    const auto t0 = Clock::now();
    result.x = refine_least_squares(*config.least_squares, result.x);
    result.value = residual_norm_sq(*config.least_squares, result.x);
    result.timings.polish_ms += ms_since(t0);
  }
  result.gap = result.value - result.bound;
  result.timings.total_ms = ms_since(start);
  return result;
}

}  // namespace gatesynth
