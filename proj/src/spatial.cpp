#include "faao/spatial.hpp"

#include <stdexcept>

namespace faao {

Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

SpatialOperator::SpatialOperator(double beta, int N, int dims, double kappa)
    : dims_(dims), kappa_(kappa), stencil_(riesz_stencil(beta, N)) {
  if (dims != 1 && dims != 2) throw std::invalid_argument("SpatialOperator supports 1 or 2 dimensions");
  if (!(kappa > 0.0)) throw std::invalid_argument("kappa must be positive");
  n_ = static_cast<std::size_t>(N) - 1;
  size_ = dims == 1 ? n_ : n_ * n_;
  g_ = ToeplitzOp::symmetric(stencil_.g);
  tau_ = tau_from_toeplitz(g_);
  const auto& lam = tau_.eigvals();
  for (double l : lam)
    if (!(l > 0.0)) throw std::domain_error("SpatialOperator: non-positive tau eigenvalue");
  mu_.resize(size_);
  if (dims == 1) {
    for (std::size_t i = 0; i < n_; ++i) mu_[i] = kappa * lam[i];
  } else {
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t k = 0; k < n_; ++k) mu_[i * n_ + k] = 0.5 * kappa * (lam[i] + lam[k]);
  }
}

void SpatialOperator::apply(std::span<const double> x, std::span<double> y, std::size_t outer, std::size_t inner) const {
  if (x.size() != outer * size_ * inner || y.size() != x.size()) throw std::invalid_argument("SpatialOperator::apply: size mismatch");
  const auto line = [this](std::span<const double> a, std::span<double> b) { g_.apply(a, b); };
  if (dims_ == 1) {
    apply_along_axis(x, y, outer, n_, inner, line);
    for (double& v : y) v *= kappa_;
    return;
  }
  std::vector<double> tmp(x.size());
  apply_along_axis(x, y, outer, n_, n_ * inner, line);
  apply_along_axis(x, tmp, outer * n_, n_, inner, line);
  const double s = 0.5 * kappa_;
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = s * (y[i] + tmp[i]);
}

std::vector<double> SpatialOperator::apply(std::span<const double> x) const {
  std::vector<double> y(x.size());
  apply(x, y, 1, x.size() / size_);
  return y;
}

void SpatialOperator::sine_transform(std::span<const double> x, std::span<double> y, std::size_t inner) const {
  fft::SineTransform(n_, dims_, inner).apply(x, y);
}

Eigen::MatrixXd SpatialOperator::dense() const {
  const auto n = static_cast<Eigen::Index>(n_);
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) g(i, j) = stencil_[i - j];
  if (dims_ == 1) return kappa_ * g;
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  return 0.5 * kappa_ * (kron(g, I) + kron(I, g));
}

Eigen::MatrixXd SpatialOperator::dense_tau() const {
  const auto n = static_cast<Eigen::Index>(n_);
  Eigen::MatrixXd t(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) t(i, j) = tau_.entry(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  if (dims_ == 1) return kappa_ * t;
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  return 0.5 * kappa_ * (kron(t, I) + kron(I, t));
}

SpatialPtr make_spatial(double beta, int N, int dims, double kappa) {
  return std::make_shared<const SpatialOperator>(beta, N, dims, kappa);
}

}  // namespace faao
