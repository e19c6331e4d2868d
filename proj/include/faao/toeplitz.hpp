#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "faao/fft.hpp"

namespace faao {

/// Dense-free Toeplitz operator T_{ij} = t_{i-j}, stored through its first column
/// (t_0, t_1, ...) and first row (t_0, t_{-1}, ...). Products use a circulant
/// embedding of size next_pow2(2n-1).
class ToeplitzOp {
 public:
  ToeplitzOp() = default;
  ToeplitzOp(std::vector<double> first_col, std::vector<double> first_row);
  static ToeplitzOp symmetric(std::vector<double> first_col);

  std::size_t size() const { return col_.size(); }
  const std::vector<double>& first_col() const { return col_; }
  const std::vector<double>& first_row() const { return row_; }
  bool is_symmetric() const;

  // y = T x. Reentrant.
  void apply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> apply(std::span<const double> x) const;
  // y = T^T x.
  void apply_transpose(std::span<const double> x, std::span<double> y) const;

  double entry(std::size_t i, std::size_t j) const { return i >= j ? col_[i - j] : row_[j - i]; }

 private:
  void apply_with(std::span<const fft::Complex> spectrum, std::span<const double> x, std::span<double> y) const;

  std::vector<double> col_;
  std::vector<double> row_;
  std::size_t embed_ = 0;
  std::shared_ptr<const fft::RealFft> fft_;
  std::vector<fft::Complex> spectrum_;     // circulant embedding of T
  std::vector<fft::Complex> spectrum_tr_;  // circulant embedding of T^T
};

/// Lower-triangular Toeplitz matrix given by its first column.
class LowerTriToeplitzOp {
 public:
  LowerTriToeplitzOp() = default;
  explicit LowerTriToeplitzOp(std::vector<double> first_col);

  std::size_t size() const { return op_.size(); }
  const std::vector<double>& first_col() const { return op_.first_col(); }

  void apply(std::span<const double> x, std::span<double> y) const { op_.apply(x, y); }
  std::vector<double> apply(std::span<const double> x) const { return op_.apply(x); }
  void apply_transpose(std::span<const double> x, std::span<double> y) const { op_.apply_transpose(x, y); }

 private:
  ToeplitzOp op_;
};

/// Hankel matrix H_{ij} = d_{i+j} given by its 2n-1 antidiagonals.
class HankelOp {
 public:
  explicit HankelOp(std::vector<double> antidiag);

  // Correction H with G_tau = T - H for a symmetric Toeplitz T with first column t:
  // antidiagonals [t_2, ..., t_{n-1}, 0, 0, 0, t_{n-1}, ..., t_2].
  static HankelOp tau_correction(std::span<const double> toeplitz_col);

  std::size_t size() const { return (antidiag_.size() + 1) / 2; }
  const std::vector<double>& antidiag() const { return antidiag_; }
  double entry(std::size_t i, std::size_t j) const { return antidiag_[i + j]; }
  void apply(std::span<const double> x, std::span<double> y) const;

 private:
  std::vector<double> antidiag_;
  ToeplitzOp flipped_;  // H J, a Toeplitz matrix
};

/// Symmetric matrix of the tau algebra, G = Q diag(eigvals) Q with Q the orthonormal DST-I.
class TauOp {
 public:
  TauOp() = default;
  // Builds the tau matrix with the given first column; eigenvalues via the ratio
  // (Q gen_col)_k / (Q e_1)_k.
  explicit TauOp(std::vector<double> gen_col);

  std::size_t size() const { return gen_col_.size(); }
  const std::vector<double>& gen_col() const { return gen_col_; }
  const std::vector<double>& eigvals() const { return eigvals_; }

  // y = Q D^power Q x. Throws std::domain_error on a non-positive eigenvalue for
  // fractional or negative powers.
  void apply_power(double power, std::span<const double> x, std::span<double> y) const;
  std::vector<double> apply_power(double power, std::span<const double> x) const;
  void apply(std::span<const double> x, std::span<double> y) const { apply_power(1.0, x, y); }

  // Dense entry of the tau matrix, reconstructed from the generator.
  double entry(std::size_t i, std::size_t j) const;

 private:
  std::vector<double> gen_col_;
  std::vector<double> eigvals_;
  std::shared_ptr<const fft::SineTransform> dst_;
};

/// Tau approximation G_tau = T - H of a symmetric Toeplitz matrix.
TauOp tau_from_toeplitz(const ToeplitzOp& T);

/// Convenience wrapper: y = Q D^power Q v.
std::vector<double> tau_solve(const TauOp& tau, double power, std::span<const double> v);

/// Inverse of a lower-triangular Toeplitz matrix, returned as its first column.
/// epsilon-circulant approximation (epsilon = sqrt(machine eps)) on a power-of-two
/// embedding followed by one Newton step X <- X (2I - L X). O(n log n).
LowerTriToeplitzOp tri_toeplitz_invert(const LowerTriToeplitzOp& L);

/// Product of lower-triangular Toeplitz matrices, i.e. the truncated convolution of
/// their first columns.
std::vector<double> tri_toeplitz_multiply(std::span<const double> a, std::span<const double> b);

/// Gohberg-Semencul representation of the inverse of a symmetric positive definite
/// Toeplitz matrix: with x = T^{-1} e_1,
///   T^{-1} = (L(x) L(x)^T - L(Z J x) L(Z J x)^T) / x_0,
/// where L(v) is lower-triangular Toeplitz with first column v, J the reversal and Z the
/// down shift. The generator comes from one tau-preconditioned CG solve.
class GsfInverse {
 public:
  explicit GsfInverse(const ToeplitzOp& T, double tol = 1e-13, int max_iter = 1000);

  void apply(std::span<const double> v, std::span<double> out) const;
  std::vector<double> apply(std::span<const double> v) const;
  int generator_iterations() const { return iterations_; }

 private:
  LowerTriToeplitzOp lx_;
  LowerTriToeplitzOp lzy_;
  double inv_x0_ = 0.0;
  int iterations_ = 0;
};

std::vector<double> gsf_inverse_apply(const ToeplitzOp& T, std::span<const double> v);

/// Writes the first columns of an operator as an (index, value) CSV for debugging.
void write_first_col_csv(const std::string& path, std::span<const double> col);

}  // namespace faao
