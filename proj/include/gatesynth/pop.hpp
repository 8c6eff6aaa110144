#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gatesynth/polymat.hpp"
#include "gatesynth/sdp.hpp"

namespace gatesynth {

/// Real polynomial in m variables compiled for fast repeated evaluation.
class CompiledPolynomial {
 public:
  CompiledPolynomial() = default;
  /// Throws InvalidArgument when `p` has time slots or a coefficient with a
  /// non-negligible imaginary part.
  explicit CompiledPolynomial(const Polynomial& p);

  int variables() const { return vars_; }
  int degree() const { return degree_; }
  double operator()(std::span<const double> x) const;

 private:
  int vars_ = 0;
  int degree_ = 0;
  std::vector<std::uint8_t> exps_;  // row-major, vars_ per term
  std::vector<double> coeffs_;
};

/// Dense Lasserre relaxation of  min p(x)  over the ball ||x|| <= R.
///
/// Internally the variables are rescaled to u = x / R (unit ball) and the
/// objective is divided by its largest coefficient; moments, extraction and
/// bounds translate back to x automatically.
struct MomentRelaxation {
  int variables = 0;
  int order = 0;             ///< relaxation order d
  double radius = 0.0;       ///< R; infinity means no ball constraint
  double objective_scale = 1.0;
  double constant_term = 0.0;  ///< scaled objective's constant coefficient
  std::vector<Monomial> moments;  ///< all monomials of degree <= 2d, grlex; moments[0] = 1
  std::map<Monomial, int, GrlexLess> index;
  int basis_size = 0;       ///< C(m+d, d)
  int localizing_size = 0;  ///< C(m+d-1, d-1) with a ball, 0 otherwise

  bool has_ball() const { return localizing_size > 0; }
  double coordinate_scale() const { return has_ball() ? radius : 1.0; }
};

struct RelaxedProblem {
  SDPProblem sdp;
  MomentRelaxation relaxation;
};

/// Build the SOS/moment pair
///   max lambda  s.t.  p - lambda = sigma_0 + (R^2 - ||x||^2) sigma_1
/// as a standard-form SDP over the Gram matrices of sigma_0 and sigma_1.
/// Its dual variables are the negated moments y_alpha, alpha != 0, of the
/// moment problem  min L_y(p)  s.t.  M_d(y) >= 0,  M_{d-1}(g y) >= 0,  y_0 = 1.
/// Throws InvalidArgument when 2d < deg(p) or R <= 0.
RelaxedProblem moment_relax(const Polynomial& p, double radius, int order);

/// Moment vector (scaled coordinates, entry 0 equal to 1) from a solved relaxation.
Eigen::VectorXd moment_vector(const MomentRelaxation& relax, const SDPSolution& solution);
/// Moments of the point mass at x (scaled coordinates).
Eigen::VectorXd point_moments(const MomentRelaxation& relax, std::span<const double> x);
/// Order-d moment matrix M_d(z).
Eigen::MatrixXd moment_matrix(const MomentRelaxation& relax, const Eigen::VectorXd& z);

/// Certified lower bound on min p over the ball: lambda minus the l1 norm of
/// the primal residual (|u^alpha| <= 1 on the unit ball), in original units.
double relaxation_bound(const MomentRelaxation& relax, const SDPSolution& solution);

/// Read x from the degree-one moments when the moment matrix is numerically
/// rank one (sigma_2 / sigma_1 < rank_tolerance); nullopt otherwise.
std::optional<std::vector<double>> extract_minimizer(const MomentRelaxation& relax, const Eigen::VectorXd& z,
                                                     double rank_tolerance = 1e-6);

struct PolishSettings {
  double gradient_tolerance = 1e-12;
  int max_steps = 50;
};

/// Damped Newton on p with exact gradient and Hessian from formal
/// differentiation. Indefinite Hessians are shifted to positive definite and
/// steps are backtracked until p decreases. Throws NumericalFailure if an
/// iterate leaves the ball of radius 2R.
std::vector<double> newton_polish(const Polynomial& p, std::span<const double> x0, double radius,
                                  const PolishSettings& settings = {});

/// p(x) = ||G(x) - target||_F^2 kept in factored form. The residual is far
/// better conditioned than the expanded polynomial near a zero of p.
struct LeastSquaresForm {
  PolyMatrix generator;
  CMatrix target;
};

/// ||G(x) - target||_F^2 evaluated from the residual.
double residual_norm_sq(const LeastSquaresForm& form, std::span<const double> x);

/// Levenberg-Marquardt on the stacked real residual of `form`, starting at x0.
/// Returns x0 unchanged if no step reduces the residual.
std::vector<double> refine_least_squares(const LeastSquaresForm& form, std::span<const double> x0,
                                         int max_steps = 30);

enum class ExtractionStatus { rank_one, polished, failed };
std::string to_string(ExtractionStatus status);

struct MinimizeConfig {
  double radius = 0.0;      ///< <= 0 selects sqrt(m) * 1.05
  int relax_order = 0;      ///< <= 0 selects ceil(deg / 2)
  int max_relax_order = 5;
  bool polish = true;
  int fallback_starts = 32;
  std::uint64_t fallback_seed = 0xC0FFEE;
  SDPSettings sdp;
  /// When set, the final point is refined on the residual and `value` is
  /// reported as the residual norm squared.
  std::optional<LeastSquaresForm> least_squares;
};

struct PhaseTimings {
  double relax_ms = 0.0;
  double solve_ms = 0.0;
  double extract_ms = 0.0;
  double polish_ms = 0.0;
  double total_ms = 0.0;
};

struct SynthesisResult {
  std::vector<double> x;      ///< reported minimizer
  double value = 0.0;         ///< p(x)
  double bound = 0.0;         ///< SDP lower bound
  double gap = 0.0;           ///< value - bound
  ExtractionStatus status = ExtractionStatus::failed;
  int relax_order = 0;        ///< order of the last relaxation solved
  double radius = 0.0;
  SDPStatus sdp_status = SDPStatus::numerical_failure;
  int sdp_iterations = 0;
  std::optional<std::vector<double>> extracted;  ///< pre-polish point, when extraction succeeded
  double extracted_value = 0.0;
  PhaseTimings timings;
};

/// Relax, solve, extract and polish; on extraction failure escalate the
/// relaxation order (up to max_relax_order), then fall back to multi-start
/// Newton from scrambled Halton points inside the ball.
SynthesisResult minimize_global(const Polynomial& p, const MinimizeConfig& config = {});

/// Deterministic scrambled-Halton points in the ball of radius R (m dims).
std::vector<std::vector<double>> ball_points(int variables, double radius, int count, std::uint64_t seed);

}  // namespace gatesynth
