#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace faao {

/// out = A v. Implementations must not assume out and v are distinct from scratch they own.
using LinearOp = std::function<void(std::span<const double> v, std::span<double> out)>;

struct SolverConfig {
  double tol = 1e-9;
  int max_iter = 1000;
  // Empty means the zero vector.
  std::vector<double> initial_guess;

  void validate(std::size_t n) const;
};

struct SolveReport {
  std::string method;
  int iterations = 0;
  bool converged = false;
  // Recursively updated ||r_k|| / ||r_0|| at exit.
  double final_relres = 0.0;
  // ||b - A x|| / ||r_0|| recomputed once at exit.
  double explicit_relres = 0.0;
  double wall_time = 0.0;
  bool flagged_dag = false;
  std::string breakdown;
};

struct SolveResult {
  std::vector<double> x;
  SolveReport report;
};

/// Conjugate gradients, optionally preconditioned by `precond` (an approximation of A^{-1}).
/// Stops when ||r_k|| / ||r_0|| <= tol. A zero curvature is reported as a breakdown.
SolveResult cg(const LinearOp& A, std::span<const double> b, const SolverConfig& cfg, const LinearOp& precond = {});

/// Left and right preconditioner inverses of the bilateral form
///   P_l^{-1} A P_r^{-1} y = P_l^{-1} b,  x = P_r^{-1} y.
/// `right` (P_r itself) is only needed to map a provided initial guess.
struct Bilateral {
  LinearOp left_inv;
  LinearOp right_inv;
  LinearOp right;
};

/// BiCGSTAB (van der Vorst). One iteration is one full step with two operator
/// applications; convergence at the half step also counts as one iteration. The
/// residual tracked is that of the (possibly preconditioned) system being iterated.
SolveResult bicgstab(const LinearOp& A, std::span<const double> b, const SolverConfig& cfg,
                     const Bilateral* preconditioners = nullptr);

/// Dense LU solve of a row-major n x n matrix. Throws std::runtime_error when the
/// matrix is numerically singular (reciprocal condition estimate below 1e-14).
std::vector<double> dense_lu_solve(std::span<const double> matrix, std::size_t n, std::span<const double> b);

/// JSON object with a stable key order.
std::string to_json(const SolveReport& report);

}  // namespace faao
