#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "faao/fft.hpp"
#include "faao/toeplitz.hpp"
#include "faao/weights.hpp"

namespace faao {

/// Discrete spatial operator S on the interior nodes:
///   1D: S = kappa G_beta
///   2D: S = 0.5 kappa (G_beta (x) I + I (x) G_beta)   (x-index outer)
/// together with its tau counterpart S_tau (G_beta replaced by G_tau).
///
/// Batched applies act on arrays laid out as (outer, space, inner): element
/// (o, p, j) lives at (o * size() + p) * inner + j.
class SpatialOperator {
 public:
  SpatialOperator(double beta, int N, int dims, double kappa);

  int dims() const { return dims_; }
  std::size_t side() const { return n_; }
  std::size_t size() const { return size_; }
  double kappa() const { return kappa_; }
  double beta() const { return stencil_.beta; }

  const RieszStencil& stencil() const { return stencil_; }
  const ToeplitzOp& toeplitz() const { return g_; }
  const TauOp& tau() const { return tau_; }

  void apply(std::span<const double> x, std::span<double> y, std::size_t outer = 1, std::size_t inner = 1) const;
  std::vector<double> apply(std::span<const double> x) const;

  // Eigenvalues of S_tau in sine-transform order: kappa lambda_i (1D) or
  // 0.5 kappa (lambda_i + lambda_k) at index i * side + k (2D).
  const std::vector<double>& tau_eigenvalues() const { return mu_; }

  // Orthonormal sine transform along the spatial axes of a (1, space, inner) array; an involution.
  void sine_transform(std::span<const double> x, std::span<double> y, std::size_t inner = 1) const;

  Eigen::MatrixXd dense() const;
  Eigen::MatrixXd dense_tau() const;

 private:
  int dims_;
  std::size_t n_;
  std::size_t size_;
  double kappa_;
  RieszStencil stencil_;
  ToeplitzOp g_;
  TauOp tau_;
  std::vector<double> mu_;
};

using SpatialPtr = std::shared_ptr<const SpatialOperator>;

SpatialPtr make_spatial(double beta, int N, int dims, double kappa);

Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// Applies `op` (a length-len map) to every line of a (outer, len, inner) array along
/// its middle axis. Lines are processed in parallel.
template <class Op>
void apply_along_axis(std::span<const double> x, std::span<double> y, std::size_t outer, std::size_t len,
                      std::size_t inner, const Op& op);

}  // namespace faao

#include "faao/detail/lines.hpp"
