#include "gatesynth/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>

#include "gatesynth/errors.hpp"

namespace gatesynth {

int SDPProblem::total_size() const {
  int n = 0;
  for (int s : block_sizes) n += s;
  return n;
}

void SDPProblem::validate() const {
  if (block_sizes.empty()) throw InvalidArgument("SDP needs at least one block");
  for (int s : block_sizes) {
    if (s < 1) throw InvalidArgument("SDP block sizes must be positive");
  }
  if (static_cast<Eigen::Index>(constraints.size()) != rhs.size()) {
    throw InvalidArgument("SDP constraint count does not match the right-hand side");
  }
  const auto check = [this](const SparseSym& a) {
    for (const auto& e : a) {
      if (e.block < 0 || e.block >= static_cast<int>(block_sizes.size())) {
        throw InvalidArgument("SDP entry refers to a missing block");
      }
      const int n = block_sizes[static_cast<std::size_t>(e.block)];
      if (e.row < 0 || e.col < 0 || e.row >= n || e.col >= n) {
        throw InvalidArgument("SDP entry outside its block");
      }
    }
  };
  check(cost);
  for (const auto& a : constraints) check(a);
}

std::string to_string(SDPStatus status) {
  switch (status) {
    case SDPStatus::optimal:
      return "optimal";
    case SDPStatus::iteration_limit:
      return "iteration_limit";
    case SDPStatus::numerical_failure:
      return "numerical_failure";
    case SDPStatus::infeasible:
      return "infeasible";
  }
  return "unknown";
}

double inner(const SparseSym& a, const BlockMatrix& x) {
  double sum = 0.0;
  for (const auto& e : a) {
    const auto& xb = x[static_cast<std::size_t>(e.block)];
    sum += e.row == e.col ? e.value * xb(e.row, e.col) : e.value * (xb(e.row, e.col) + xb(e.col, e.row));
  }
  return sum;
}

BlockMatrix to_dense(const SparseSym& a, const std::vector<int>& block_sizes) {
  BlockMatrix out;
  for (int s : block_sizes) out.push_back(Eigen::MatrixXd::Zero(s, s));
  for (const auto& e : a) {
    auto& b = out[static_cast<std::size_t>(e.block)];
    b(e.row, e.col) += e.value;
    if (e.row != e.col) b(e.col, e.row) += e.value;
  }
  return out;
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double dot(const BlockMatrix& a, const BlockMatrix& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k].array() * b[k].array()).sum();
  return s;
}

double frobenius(const BlockMatrix& a) { return std::sqrt(dot(a, a)); }

BlockMatrix zeros(const std::vector<int>& sizes) {
  BlockMatrix out;
  for (int s : sizes) out.push_back(MatrixXd::Zero(s, s));
  return out;
}

void axpy(double alpha, const BlockMatrix& x, BlockMatrix& y) {
  for (std::size_t k = 0; k < y.size(); ++k) y[k] += alpha * x[k];
}

void add_scaled(const SparseSym& a, double alpha, BlockMatrix& out) {
  for (const auto& e : a) {
    auto& b = out[static_cast<std::size_t>(e.block)];
    b(e.row, e.col) += alpha * e.value;
    if (e.row != e.col) b(e.col, e.row) += alpha * e.value;
  }
}

VectorXd apply_constraints(const SDPProblem& p, const BlockMatrix& x) {
  VectorXd out(static_cast<Eigen::Index>(p.constraints.size()));
  for (std::size_t i = 0; i < p.constraints.size(); ++i) out(static_cast<Eigen::Index>(i)) = inner(p.constraints[i], x);
  return out;
}

BlockMatrix apply_adjoint(const SDPProblem& p, const VectorXd& y) {
  BlockMatrix out = zeros(p.block_sizes);
  for (std::size_t i = 0; i < p.constraints.size(); ++i) add_scaled(p.constraints[i], y(static_cast<Eigen::Index>(i)), out);
  return out;
}

// Nesterov-Todd scaling of one block: G^T Z G = G^{-1} X G^{-T} = diag(d), W = G G^T.
struct BlockScaling {
  MatrixXd g;
  MatrixXd g_inv;
  MatrixXd w;
  VectorXd d;
};

bool nt_scaling(const MatrixXd& x, const MatrixXd& z, BlockScaling& out) {
  Eigen::LLT<MatrixXd> chol(x);
  if (chol.info() != Eigen::Success) return false;
  const MatrixXd l = chol.matrixL();
  MatrixXd s = l.transpose() * z * l;
  s = 0.5 * (s + s.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(s);
  if (eig.info() != Eigen::Success) return false;
  const VectorXd& lambda = eig.eigenvalues();
  if (lambda.minCoeff() <= 0.0) return false;
  out.d = lambda.array().sqrt();
  const VectorXd d_inv_sqrt = out.d.array().rsqrt();
  const VectorXd d_sqrt = out.d.array().sqrt();
  out.g = l * eig.eigenvectors() * d_inv_sqrt.asDiagonal();
  // G^{-1} = D^{1/2} U^T L^{-1}
  const MatrixXd l_inv = chol.matrixL().solve(MatrixXd::Identity(x.rows(), x.cols()));
  out.g_inv = d_sqrt.asDiagonal() * eig.eigenvectors().transpose() * l_inv;
  out.w = out.g * out.g.transpose();
  out.w = 0.5 * (out.w + out.w.transpose()).eval();
  return true;
}

// Largest alpha with X + alpha dX >= 0 (infinity when dX keeps X inside the cone).
double max_step(const MatrixXd& x, const MatrixXd& dx) {
  Eigen::LLT<MatrixXd> chol(x);
  if (chol.info() != Eigen::Success) return 0.0;
  MatrixXd t = chol.matrixL().solve(dx);
  t = chol.matrixL().solve(t.transpose()).transpose();
  t = 0.5 * (t + t.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(t, Eigen::EigenvaluesOnly);
  const double lmin = eig.eigenvalues().minCoeff();
  return lmin >= 0.0 ? std::numeric_limits<double>::infinity() : -1.0 / lmin;
}

double max_step(const BlockMatrix& x, const BlockMatrix& dx) {
  double a = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < x.size(); ++k) a = std::min(a, max_step(x[k], dx[k]));
  return a;
}

MatrixXd schur_matrix(const SDPProblem& p, const std::vector<BlockScaling>& sc) {
  const auto m = static_cast<Eigen::Index>(p.constraints.size());
  MatrixXd schur(m, m);
  BlockMatrix t = zeros(p.block_sizes);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (auto& b : t) b.setZero();
    // T = W A_j W, accumulated from rank-one pieces of the sparse A_j.
    for (const auto& e : p.constraints[static_cast<std::size_t>(j)]) {
      const MatrixXd& w = sc[static_cast<std::size_t>(e.block)].w;
      auto& tb = t[static_cast<std::size_t>(e.block)];
      tb.noalias() += e.value * w.col(e.row) * w.col(e.col).transpose();
      if (e.row != e.col) tb.noalias() += e.value * w.col(e.col) * w.col(e.row).transpose();
    }
    for (Eigen::Index i = 0; i <= j; ++i) {
      const double v = inner(p.constraints[static_cast<std::size_t>(i)], t);
      schur(i, j) = v;
      schur(j, i) = v;
    }
  }
  return schur;
}

class SchurSolver {
 public:
  explicit SchurSolver(const MatrixXd& m) : llt_(m) {
    if (llt_.info() != Eigen::Success) {
      use_ldlt_ = true;
      ldlt_.compute(m);
    }
  }
  bool ok() const { return use_ldlt_ ? ldlt_.info() == Eigen::Success : true; }
  VectorXd solve(const VectorXd& rhs) const { return use_ldlt_ ? VectorXd(ldlt_.solve(rhs)) : VectorXd(llt_.solve(rhs)); }

 private:
  Eigen::LLT<MatrixXd> llt_;
  Eigen::LDLT<MatrixXd> ldlt_;
  bool use_ldlt_ = false;
};

struct Direction {
  BlockMatrix dx;
  BlockMatrix dz;
  VectorXd dy;
};

// Solve  A(dX) = rp,  A^T dy + dZ = Rd,  dX + W dZ W = Rc.
Direction solve_direction(const SDPProblem& p, const std::vector<BlockScaling>& sc, const SchurSolver& schur,
                          const VectorXd& rp, const BlockMatrix& rd, const BlockMatrix& rc) {
  BlockMatrix w_rd_w = rd;
  for (std::size_t k = 0; k < rd.size(); ++k) w_rd_w[k] = sc[k].w * rd[k] * sc[k].w;
  const VectorXd rhs = rp - apply_constraints(p, rc) + apply_constraints(p, w_rd_w);
  Direction dir;
  dir.dy = schur.solve(rhs);
  dir.dz = rd;
  axpy(-1.0, apply_adjoint(p, dir.dy), dir.dz);
  dir.dx = rc;
  for (std::size_t k = 0; k < rc.size(); ++k) {
    dir.dx[k] -= sc[k].w * dir.dz[k] * sc[k].w;
    dir.dx[k] = 0.5 * (dir.dx[k] + dir.dx[k].transpose()).eval();
    dir.dz[k] = 0.5 * (dir.dz[k] + dir.dz[k].transpose()).eval();
  }
  return dir;
}

// Rc = G S G^T with S_ij = 2 R_ij / (d_i + d_j): the NT-symmetrized complementarity target.
MatrixXd complementarity_target(const BlockScaling& sc, const MatrixXd& r) {
  const Eigen::Index n = r.rows();
  MatrixXd s(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) s(i, j) = 2.0 * r(i, j) / (sc.d(i) + sc.d(j));
  }
  return sc.g * s * sc.g.transpose();
}

}  // namespace

SDPSolution sdp_solve(const SDPProblem& problem, const SDPSettings& settings) {
  problem.validate();
  const auto& sizes = problem.block_sizes;
  const double n = problem.total_size();
  const auto m = static_cast<Eigen::Index>(problem.constraints.size());
  const BlockMatrix c = to_dense(problem.cost, sizes);
  const VectorXd& b = problem.rhs;
  const double b_norm = b.norm();
  const double c_norm = frobenius(c);

  // Starting point in the spirit of SDPT3's default scaling.
  double xi = std::max(10.0, std::sqrt(n));
  double eta = std::max({10.0, std::sqrt(n), c_norm});
  for (Eigen::Index i = 0; i < m; ++i) {
    const double a_norm = frobenius(to_dense(problem.constraints[static_cast<std::size_t>(i)], sizes));
    xi = std::max(xi, std::sqrt(n) * (1.0 + std::abs(b(i))) / (1.0 + a_norm));
    eta = std::max(eta, a_norm);
  }
  BlockMatrix x;
  BlockMatrix z;
  for (int s : sizes) {
    x.push_back(xi * MatrixXd::Identity(s, s));
    z.push_back(eta * MatrixXd::Identity(s, s));
  }
  VectorXd y = VectorXd::Zero(m);

  SDPSolution best;
  double best_merit = std::numeric_limits<double>::infinity();
  int stalled = 0;

  for (int iter = 0;; ++iter) {
    const VectorXd rp = b - apply_constraints(problem, x);
    BlockMatrix rd = c;
    axpy(-1.0, z, rd);
    axpy(-1.0, apply_adjoint(problem, y), rd);

    const double pobj = dot(c, x);
    const double dobj = b.dot(y);
    const double mu = dot(x, z) / n;
    const double rel_gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    const double pinf = rp.norm() / (1.0 + b_norm);
    const double dinf = frobenius(rd) / (1.0 + c_norm);
    const double merit = std::max({rel_gap, pinf, dinf});
    if (std::getenv("GATESYNTH_SDP_TRACE")) {
      std::fprintf(stderr, "it %2d pobj %.10e dobj %.10e gap %.2e pinf %.2e dinf %.2e mu %.2e\n", iter, pobj, dobj,
                   rel_gap, pinf, dinf, mu);
    }

    if (merit < best_merit) {
      best_merit = merit;
      best.x = x;
      best.z = z;
      best.y = y;
      best.primal_value = pobj;
      best.dual_value = dobj;
      best.relative_gap = rel_gap;
      best.primal_infeasibility = pinf;
      best.dual_infeasibility = dinf;
      best.primal_residual = rp;
      best.iterations = iter;
      stalled = 0;
    } else {
      ++stalled;
    }

    if (rel_gap <= settings.gap_tolerance && pinf <= settings.feasibility_tolerance &&
        dinf <= settings.feasibility_tolerance) {
      best.status = SDPStatus::optimal;
      return best;
    }
    if (iter >= settings.max_iterations) {
      best.status = SDPStatus::iteration_limit;
      return best;
    }
    if (frobenius(x) > 1e12 || y.norm() > 1e12) {
      best.status = SDPStatus::infeasible;
      return best;
    }
    if (stalled > 8) {
      best.status = SDPStatus::numerical_failure;
      return best;
    }

    std::vector<BlockScaling> sc(sizes.size());
    for (std::size_t k = 0; k < sizes.size(); ++k) {
      if (!nt_scaling(x[k], z[k], sc[k])) {
        best.status = SDPStatus::numerical_failure;
        return best;
      }
    }
    const SchurSolver schur(schur_matrix(problem, sc));
    if (!schur.ok()) {
      best.status = SDPStatus::numerical_failure;
      return best;
    }

    // Predictor (affine scaling, sigma = 0): Rc = -X.
    BlockMatrix rc = x;
    for (auto& blk : rc) blk = -blk;
    const Direction pred = solve_direction(problem, sc, schur, rp, rd, rc);
    const double ap_aff = std::min(1.0, max_step(x, pred.dx));
    const double ad_aff = std::min(1.0, max_step(z, pred.dz));
    BlockMatrix x_aff = x;
    BlockMatrix z_aff = z;
    axpy(ap_aff, pred.dx, x_aff);
    axpy(ad_aff, pred.dz, z_aff);
    const double mu_aff = dot(x_aff, z_aff) / n;
    const double sigma = std::clamp(std::pow(mu_aff / mu, 3.0), 0.0, 1.0);

    // Corrector: R = sigma mu I - D^2 - sym(dX~ dZ~) in the scaled space.
    for (std::size_t k = 0; k < sizes.size(); ++k) {
      const MatrixXd px = sc[k].g_inv * pred.dx[k] * sc[k].g_inv.transpose();
      const MatrixXd pz = sc[k].g.transpose() * pred.dz[k] * sc[k].g;
      MatrixXd r = -0.5 * (px * pz + pz * px);
      r.diagonal().array() += sigma * mu;
      r.diagonal() -= sc[k].d.cwiseAbs2();
      rc[k] = complementarity_target(sc[k], r);
    }
    const Direction corr = solve_direction(problem, sc, schur, rp, rd, rc);
    const double ap = std::min(1.0, settings.step_fraction * max_step(x, corr.dx));
    const double ad = std::min(1.0, settings.step_fraction * max_step(z, corr.dz));
    if (!(ap > 0.0) || !(ad > 0.0) || !std::isfinite(ap) || !std::isfinite(ad)) {
      best.status = SDPStatus::numerical_failure;
      return best;
    }
    axpy(ap, corr.dx, x);
    axpy(ad, corr.dz, z);
    y += ad * corr.dy;
  }
}

}  // namespace gatesynth
