#include "faao/krylov.hpp"

#include <Eigen/LU>

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace faao {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// b - A x.
std::vector<double> residual(const LinearOp& A, std::span<const double> b, std::span<const double> x) {
  std::vector<double> r(b.size());
  A(x, r);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
  return r;
}

}  // namespace

void SolverConfig::validate(std::size_t n) const {
  if (!(tol > 0.0)) throw std::invalid_argument("solver tolerance must be positive");
  if (max_iter < 1) throw std::invalid_argument("solver max_iter must be >= 1");
  if (!initial_guess.empty() && initial_guess.size() != n) throw std::invalid_argument("initial guess length mismatch");
}

SolveResult cg(const LinearOp& A, std::span<const double> b, const SolverConfig& cfg, const LinearOp& precond) {
  const auto t0 = Clock::now();
  const std::size_t n = b.size();
  cfg.validate(n);
  SolveResult out;
  out.report.method = precond ? "pcg" : "cg";
  out.x = cfg.initial_guess.empty() ? std::vector<double>(n, 0.0) : cfg.initial_guess;
  std::vector<double> r = residual(A, b, out.x);
  const double r0 = norm(r);
  SolveReport& rep = out.report;
  if (r0 == 0.0) {
    rep.converged = true;
    rep.wall_time = seconds_since(t0);
    return out;
  }
  std::vector<double> z(n), p(n), q(n);
  if (precond) precond(r, z); else z = r;
  p = z;
  double rz = dot(r, z);
  double rel = 1.0;
  for (int k = 1; k <= cfg.max_iter; ++k) {
    A(p, q);
    const double curv = dot(p, q);
    if (!(curv > 0.0) || !std::isfinite(curv)) {
      rep.breakdown = "non-positive curvature";
      break;
    }
    const double step = rz / curv;
    for (std::size_t i = 0; i < n; ++i) {
      out.x[i] += step * p[i];
      r[i] -= step * q[i];
    }
    rep.iterations = k;
    rel = norm(r) / r0;
    if (rel <= cfg.tol) {
      rep.converged = true;
      break;
    }
    if (precond) precond(r, z); else z = r;
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  rep.final_relres = rel;
  rep.explicit_relres = norm(residual(A, b, out.x)) / r0;
  rep.flagged_dag = !rep.converged;
  rep.wall_time = seconds_since(t0);
  return out;
}

SolveResult bicgstab(const LinearOp& A, std::span<const double> b, const SolverConfig& cfg, const Bilateral* pc) {
  const auto t0 = Clock::now();
  const std::size_t n = b.size();
  cfg.validate(n);
  SolveResult out;
  SolveReport& rep = out.report;
  rep.method = pc ? "pbicgstab" : "bicgstab";

  // Operator and right-hand side of the system actually iterated on.
  LinearOp op = A;
  std::vector<double> rhs(b.begin(), b.end());
  std::vector<double> tmp(n), tmp2(n);
  if (pc) {
    if (!pc->left_inv || !pc->right_inv) throw std::invalid_argument("bilateral preconditioning needs both inverses");
    op = [&A, pc, &tmp, &tmp2](std::span<const double> v, std::span<double> o) {
      pc->right_inv(v, tmp);
      A(tmp, tmp2);
      pc->left_inv(tmp2, o);
    };
    pc->left_inv(b, rhs);
  }

  std::vector<double> y(n, 0.0);
  if (!cfg.initial_guess.empty()) {
    if (pc) {
      if (!pc->right) throw std::invalid_argument("an initial guess under bilateral preconditioning needs P_r");
      pc->right(cfg.initial_guess, y);
    } else {
      y = cfg.initial_guess;
    }
  }

  std::vector<double> r = residual(op, rhs, y);
  const double r0 = norm(r);
  double rel = 1.0;
  if (r0 == 0.0) {
    rep.converged = true;
    rel = 0.0;
  } else {
    const std::vector<double> rhat = r;
    std::vector<double> p(n, 0.0), v(n, 0.0), s(n), t(n);
    double rho = 1.0, alpha = 1.0, omega = 1.0;
    for (int k = 1; k <= cfg.max_iter; ++k) {
      const double rho_new = dot(rhat, r);
      if (rho_new == 0.0 || !std::isfinite(rho_new)) {
        rep.breakdown = "rho breakdown";
        break;
      }
      if (k == 1) {
        p = r;
      } else {
        const double beta = (rho_new / rho) * (alpha / omega);
        for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
      }
      rho = rho_new;
      op(p, v);
      const double rv = dot(rhat, v);
      if (rv == 0.0 || !std::isfinite(rv)) {
        rep.breakdown = "rho breakdown";
        break;
      }
      alpha = rho / rv;
      for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
      rep.iterations = k;
      const double srel = norm(s) / r0;
      if (srel <= cfg.tol) {
        for (std::size_t i = 0; i < n; ++i) y[i] += alpha * p[i];
        r = s;
        rel = srel;
        rep.converged = true;
        break;
      }
      op(s, t);
      const double tt = dot(t, t);
      if (tt == 0.0 || !std::isfinite(tt)) {
        for (std::size_t i = 0; i < n; ++i) y[i] += alpha * p[i];
        r = s;
        rel = srel;
        rep.breakdown = "omega breakdown";
        break;
      }
      omega = dot(t, s) / tt;
      for (std::size_t i = 0; i < n; ++i) {
        y[i] += alpha * p[i] + omega * s[i];
        r[i] = s[i] - omega * t[i];
      }
      rel = norm(r) / r0;
      if (rel <= cfg.tol) {
        rep.converged = true;
        break;
      }
      if (omega == 0.0) {
        rep.breakdown = "omega breakdown";
        break;
      }
    }
  }
  rep.final_relres = rel;
  rep.explicit_relres = r0 == 0.0 ? 0.0 : norm(residual(op, rhs, y)) / r0;
  rep.flagged_dag = !rep.converged;

  if (pc) {
    out.x.assign(n, 0.0);
    pc->right_inv(y, out.x);
  } else {
    out.x = std::move(y);
  }
  rep.wall_time = seconds_since(t0);
  return out;
}

std::vector<double> dense_lu_solve(std::span<const double> matrix, std::size_t n, std::span<const double> b) {
  if (matrix.size() != n * n || b.size() != n) throw std::invalid_argument("dense_lu_solve: size mismatch");
  const auto ln = static_cast<Eigen::Index>(n);
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const Eigen::PartialPivLU<RowMajor> lu(Eigen::Map<const RowMajor>(matrix.data(), ln, ln));
  if (!(lu.rcond() > 1e-14)) throw std::runtime_error("dense_lu_solve: matrix is numerically singular");
  const Eigen::VectorXd x = lu.solve(Eigen::Map<const Eigen::VectorXd>(b.data(), ln));
  return {x.data(), x.data() + n};
}

std::string to_json(const SolveReport& r) {
  nlohmann::ordered_json j;
  j["method"] = r.method;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["final_relres"] = r.final_relres;
  j["explicit_relres"] = r.explicit_relres;
  j["wall_time"] = r.wall_time;
  j["flagged_dag"] = r.flagged_dag;
  j["breakdown"] = r.breakdown;
  return j.dump(2);
}

}  // namespace faao
