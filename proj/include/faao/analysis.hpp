#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "faao/assembly.hpp"
#include "faao/krylov.hpp"
#include "faao/precond.hpp"

namespace faao {

/// Largest dense problem the analysis paths will materialize.
inline constexpr std::size_t kDenseGuard = 20000;

struct ErrorReport {
  double err_inf = 0.0;  // max over all nodes and levels t_1..t_M
  double err_2 = 0.0;    // max over levels of the h-weighted discrete L2 norm
  std::optional<double> order_inf;
  std::optional<double> order_2;
};

/// Errors of `numeric` against the exact solution of spec.example_id.
ErrorReport compute_errors(const SolutionField& numeric, const ProblemSpec& spec);

/// Observed orders log(e_1/e_2)/log(s_1/s_2) between consecutive entries, where s is the
/// refined step (tau for a time ladder, h for a space ladder). Fills order_* from the
/// second report on.
void fill_orders(std::vector<ErrorReport>& reports, const std::vector<double>& steps);

enum class MatrixTag {
  kSystem,            // M~
  kLeftPreconditioned,   // P_l^{-1} M~
  kRightPreconditioned,  // M~ P_r^{-1}
  kBilateral,         // P_l^{-1} M~ P_r^{-1}
  kTimeSymmetric,     // A_t + A_t^T
  kTauPreconditionedSpace,  // S_tau^{-1} S  (G_tau^{-1} G_beta in 1D)
};

std::string to_string(MatrixTag tag);
MatrixTag parse_matrix_tag(const std::string& name);

struct SpectrumReport {
  MatrixTag tag = MatrixTag::kSystem;
  std::vector<std::complex<double>> eigenvalues;
  std::vector<double> singular_values;  // descending
  double kappa2 = 0.0;
};

/// Column-by-column materialization of an n x n operator.
Eigen::MatrixXd dense_materialize(const LinearOp& op, std::size_t n);

/// Dense matrix for `tag`. Guarded by kDenseGuard; throws std::length_error beyond it.
Eigen::MatrixXd dense_matrix(MatrixTag tag, const AllAtOnceSystem& sys);

/// Singular values, descending.
std::vector<double> singular_values(const Eigen::MatrixXd& A);

/// Eigenvalues of a general real matrix.
std::vector<std::complex<double>> eigenvalues(const Eigen::MatrixXd& A);

enum class CondMethod { kDense, kIterative };

struct IterativeCondOptions {
  double tol = 1e-6;
  int max_outer = 5000;
  double inner_tol = 1e-10;
  int inner_max_iter = 5000;
};

/// kappa_2 = sigma_max / sigma_min of the operator named by `tag`. The iterative path
/// runs power and inverse-power iterations on the normal operator through the fast
/// applies; it supports the four system-level tags.
SpectrumReport condition_number(MatrixTag tag, const AllAtOnceSystem& sys, CondMethod method,
                                const IterativeCondOptions& options = {});

/// Full eigenvalue set of the dense matrix for `tag`; writes (re, im) CSV when `csv_path` is non-empty.
SpectrumReport spectrum_dump(MatrixTag tag, const AllAtOnceSystem& sys, const std::string& csv_path = {});

}  // namespace faao
