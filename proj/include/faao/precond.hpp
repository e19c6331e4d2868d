#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "faao/assembly.hpp"
#include "faao/toeplitz.hpp"

namespace faao {

struct PreconditionerOptions {
  // Cached Sigma_{n,22}^{-1} columns above this estimate are recomputed per apply instead.
  std::size_t memory_limit_bytes = std::size_t{4} << 30;
};

/// Bilateral preconditioner for the space-major system M~ = S (x) I_t + I_x (x) A_t:
///   P_l = S_tau^{-1/2} (x) A_t + S_tau^{1/2} (x) I_t,   P_r = S_tau^{1/2} (x) I_t.
/// With S_tau = Q diag(mu) Q, P_l^{-1} = (Q (x) I) blockdiag(Sigma_n^{-1}) (Q (x) I) where
/// Sigma_n = mu_n^{1/2} I + mu_n^{-1/2} A_t is lower triangular with the same 2x2 block split
/// as A_t.
class BilateralPreconditioner {
 public:
  explicit BilateralPreconditioner(const AllAtOnceSystem& sys, const PreconditionerOptions& options = {});

  std::size_t size() const { return space_ * time_; }
  bool cached() const { return cached_; }
  const std::vector<double>& eigenvalues() const { return mu_; }

  // Sigma_{n,11}^{-1}.
  double sigma11_inv(std::size_t n) const { return s11_inv_[n]; }
  // First column of Sigma_{n,22}^{-1}.
  std::vector<double> sigma22_inv_col(std::size_t n) const;

  void apply_Pr_inv(std::span<const double> v, std::span<double> out) const;
  void apply_Pr(std::span<const double> v, std::span<double> out) const;
  void apply_Pl_inv(std::span<const double> v, std::span<double> out) const;
  void apply_Pl(std::span<const double> v, std::span<double> out) const;
  // Transposes for the normal-operator condition number estimate.
  void apply_Pl_inv_transpose(std::span<const double> v, std::span<double> out) const;
  // P_r is symmetric.
  void apply_Pr_inv_transpose(std::span<const double> v, std::span<double> out) const { apply_Pr_inv(v, out); }

  // z = P_l^{-1} M~ P_r^{-1} v.
  void apply_preconditioned_operator(const AllAtOnceSystem& sys, std::span<const double> v, std::span<double> out) const;

  // Per-block Sigma_n^{-1} y (in place) for a length-(M-1) time vector; exposed for tests.
  void sigma_solve(std::size_t n, std::span<double> y) const;
  void sigma_solve_transpose(std::size_t n, std::span<double> y) const;

 private:
  LowerTriToeplitzOp sigma22_inverse(std::size_t n) const;
  void scale_modes(std::span<const double> v, std::span<double> out, double power) const;

  std::size_t space_ = 0;
  std::size_t time_ = 0;
  SpatialPtr spatial_;
  double a11_ = 0.0;
  std::vector<double> a12_;
  std::vector<double> a22_col_;
  std::vector<double> mu_;
  std::vector<double> s11_inv_;
  bool cached_ = true;
  std::vector<LowerTriToeplitzOp> s22_inv_;
  TimeBlockMatrix At_;
};

BilateralPreconditioner build_preconditioner(const AllAtOnceSystem& sys, const PreconditionerOptions& options = {});

}  // namespace faao
