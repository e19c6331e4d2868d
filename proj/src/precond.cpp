#include "faao/precond.hpp"

#include <cmath>
#include <stdexcept>

namespace faao {

namespace {

void check_len(std::size_t expected, std::size_t got, const char* what) {
  if (expected != got) throw std::invalid_argument(std::string(what) + ": length mismatch");
}

// Rough footprint of one cached Sigma_22^{-1}: first column, zero row and the circulant spectrum.
std::size_t cache_bytes(std::size_t modes, std::size_t order) { return modes * order * 64; }

}  // namespace

BilateralPreconditioner::BilateralPreconditioner(const AllAtOnceSystem& sys, const PreconditionerOptions& options)
    : At_(sys.At()) {
  if (sys.ordering() != Ordering::kSpaceMajor) throw std::invalid_argument("the bilateral preconditioner needs the space-major system");
  space_ = sys.space_size();
  time_ = sys.time_size();
  spatial_ = sys.spatial_ptr();
  a11_ = At_.a11();
  a12_ = At_.a12();
  a22_col_ = At_.a22().first_col();
  mu_ = spatial_->tau_eigenvalues();
  for (double m : mu_)
    if (!(m > 0.0)) throw std::domain_error("bilateral preconditioner: non-positive tau eigenvalue");

  s11_inv_.resize(space_);
  for (std::size_t n = 0; n < space_; ++n) {
    const double r = std::sqrt(mu_[n]);
    s11_inv_[n] = 1.0 / (r + a11_ / r);
  }
  cached_ = cache_bytes(space_, time_ - 1) <= options.memory_limit_bytes;
  if (cached_) {
    s22_inv_.resize(space_);
    const long modes = static_cast<long>(space_);
#pragma omp parallel for schedule(dynamic, 16) if (modes > 16)
    for (long n = 0; n < modes; ++n) s22_inv_[static_cast<std::size_t>(n)] = sigma22_inverse(static_cast<std::size_t>(n));
  }
}

LowerTriToeplitzOp BilateralPreconditioner::sigma22_inverse(std::size_t n) const {
  const double r = std::sqrt(mu_[n]);
  std::vector<double> col(a22_col_.size());
  for (std::size_t k = 0; k < col.size(); ++k) col[k] = a22_col_[k] / r;
  col[0] += r;
  return tri_toeplitz_invert(LowerTriToeplitzOp(std::move(col)));
}

std::vector<double> BilateralPreconditioner::sigma22_inv_col(std::size_t n) const {
  return cached_ ? s22_inv_[n].first_col() : sigma22_inverse(n).first_col();
}

void BilateralPreconditioner::sigma_solve(std::size_t n, std::span<double> y) const {
  check_len(time_, y.size(), "sigma_solve");
  const double inv_r = 1.0 / std::sqrt(mu_[n]);
  const double y1 = s11_inv_[n] * y[0];
  y[0] = y1;
  std::span<double> tail = y.subspan(1);
  for (std::size_t k = 0; k < tail.size(); ++k) tail[k] -= inv_r * a12_[k] * y1;
  if (cached_) {
    s22_inv_[n].apply(tail, tail);
  } else {
    sigma22_inverse(n).apply(tail, tail);
  }
}

void BilateralPreconditioner::sigma_solve_transpose(std::size_t n, std::span<double> y) const {
  check_len(time_, y.size(), "sigma_solve_transpose");
  const double inv_r = 1.0 / std::sqrt(mu_[n]);
  std::span<double> tail = y.subspan(1);
  if (cached_) {
    s22_inv_[n].apply_transpose(tail, tail);
  } else {
    sigma22_inverse(n).apply_transpose(tail, tail);
  }
  double z1 = y[0];
  for (std::size_t k = 0; k < tail.size(); ++k) z1 -= inv_r * a12_[k] * tail[k];
  y[0] = s11_inv_[n] * z1;
}

void BilateralPreconditioner::scale_modes(std::span<const double> v, std::span<double> out, double power) const {
  check_len(size(), v.size(), "preconditioner input");
  check_len(size(), out.size(), "preconditioner output");
  spatial_->sine_transform(v, out, time_);
  for (std::size_t n = 0; n < space_; ++n) {
    const double s = std::pow(mu_[n], power);
    for (std::size_t j = 0; j < time_; ++j) out[n * time_ + j] *= s;
  }
  spatial_->sine_transform(out, out, time_);
}

void BilateralPreconditioner::apply_Pr_inv(std::span<const double> v, std::span<double> out) const { scale_modes(v, out, -0.5); }

void BilateralPreconditioner::apply_Pr(std::span<const double> v, std::span<double> out) const { scale_modes(v, out, 0.5); }

void BilateralPreconditioner::apply_Pl_inv(std::span<const double> v, std::span<double> out) const {
  check_len(size(), v.size(), "apply_Pl_inv input");
  check_len(size(), out.size(), "apply_Pl_inv output");
  spatial_->sine_transform(v, out, time_);
  const long modes = static_cast<long>(space_);
#pragma omp parallel for schedule(static) if (modes > 1 && time_ >= 16)
  for (long n = 0; n < modes; ++n) {
    const auto m = static_cast<std::size_t>(n);
    sigma_solve(m, out.subspan(m * time_, time_));
  }
  spatial_->sine_transform(out, out, time_);
}

void BilateralPreconditioner::apply_Pl_inv_transpose(std::span<const double> v, std::span<double> out) const {
  check_len(size(), v.size(), "apply_Pl_inv_transpose input");
  check_len(size(), out.size(), "apply_Pl_inv_transpose output");
  spatial_->sine_transform(v, out, time_);
  const long modes = static_cast<long>(space_);
#pragma omp parallel for schedule(static) if (modes > 1 && time_ >= 16)
  for (long n = 0; n < modes; ++n) {
    const auto m = static_cast<std::size_t>(n);
    sigma_solve_transpose(m, out.subspan(m * time_, time_));
  }
  spatial_->sine_transform(out, out, time_);
}

void BilateralPreconditioner::apply_Pl(std::span<const double> v, std::span<double> out) const {
  check_len(size(), v.size(), "apply_Pl input");
  check_len(size(), out.size(), "apply_Pl output");
  std::vector<double> z(size());
  spatial_->sine_transform(v, z, time_);
  const long modes = static_cast<long>(space_);
#pragma omp parallel for schedule(static) if (modes > 1 && time_ >= 16)
  for (long n = 0; n < modes; ++n) {
    const auto m = static_cast<std::size_t>(n);
    const double r = std::sqrt(mu_[m]);
    std::span<const double> in(z.data() + m * time_, time_);
    std::span<double> o = out.subspan(m * time_, time_);
    At_.apply(in, o);
    for (std::size_t j = 0; j < time_; ++j) o[j] = o[j] / r + r * in[j];
  }
  spatial_->sine_transform(out, out, time_);
}

void BilateralPreconditioner::apply_preconditioned_operator(const AllAtOnceSystem& sys, std::span<const double> v,
                                                            std::span<double> out) const {
  std::vector<double> a(size()), b(size());
  apply_Pr_inv(v, a);
  system_matvec(sys, a, b);
  apply_Pl_inv(b, out);
}

BilateralPreconditioner build_preconditioner(const AllAtOnceSystem& sys, const PreconditionerOptions& options) {
  return BilateralPreconditioner(sys, options);
}

}  // namespace faao
