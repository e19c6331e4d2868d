#include "faao/toeplitz.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <stdexcept>
#include <utility>

#include "faao/krylov.hpp"

namespace faao {

namespace {

// Below this order products are evaluated directly.
constexpr std::size_t kDirectLimit = 16;

void check_len(std::size_t expected, std::size_t got, const char* what) {
  if (expected != got) throw std::invalid_argument(std::string(what) + ": length mismatch");
}

std::vector<fft::Complex> circulant_spectrum(std::span<const double> col, std::span<const double> row, std::size_t m) {
  std::vector<double> c(m, 0.0);
  const std::size_t n = col.size();
  for (std::size_t k = 0; k < n; ++k) c[k] = col[k];
  for (std::size_t k = 1; k < n; ++k) c[m - k] = row[k];
  fft::RealFft f(m);
  std::vector<fft::Complex> s(f.spectrum_size());
  f.forward(c, s);
  return s;
}

// Truncated linear convolution (first n entries of a * b).
std::vector<double> truncated_convolution(std::span<const double> a, std::span<const double> b, std::size_t n) {
  std::vector<double> out(n, 0.0);
  if (n <= kDirectLimit) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k <= i; ++k) out[i] += a[k] * b[i - k];
    return out;
  }
  const std::size_t m = fft::next_pow2(2 * n - 1);
  fft::RealFft f(m);
  std::vector<double> pa(m, 0.0), pb(m, 0.0);
  std::copy_n(a.begin(), n, pa.begin());
  std::copy_n(b.begin(), n, pb.begin());
  std::vector<fft::Complex> sa(f.spectrum_size()), sb(f.spectrum_size());
  f.forward(pa, sa);
  f.forward(pb, sb);
  for (std::size_t k = 0; k < sa.size(); ++k) sa[k] *= sb[k];
  f.inverse(sa, pa);
  std::copy_n(pa.begin(), n, out.begin());
  return out;
}

}  // namespace

ToeplitzOp::ToeplitzOp(std::vector<double> first_col, std::vector<double> first_row)
    : col_(std::move(first_col)), row_(std::move(first_row)) {
  if (col_.empty()) throw std::invalid_argument("ToeplitzOp needs a non-empty first column");
  check_len(col_.size(), row_.size(), "ToeplitzOp first row");
  if (row_[0] != col_[0]) throw std::invalid_argument("ToeplitzOp: first_row[0] must equal first_col[0]");
  if (col_.size() > kDirectLimit) {
    embed_ = fft::next_pow2(2 * col_.size() - 1);
    fft_ = std::make_shared<const fft::RealFft>(embed_);
    spectrum_ = circulant_spectrum(col_, row_, embed_);
    spectrum_tr_ = is_symmetric() ? spectrum_ : circulant_spectrum(row_, col_, embed_);
  }
}

ToeplitzOp ToeplitzOp::symmetric(std::vector<double> first_col) {
  std::vector<double> row = first_col;
  return ToeplitzOp(std::move(first_col), std::move(row));
}

bool ToeplitzOp::is_symmetric() const { return col_ == row_; }

void ToeplitzOp::apply_with(std::span<const fft::Complex> spectrum, std::span<const double> x, std::span<double> y) const {
  const std::size_t n = col_.size();
  const fft::RealFft& f = *fft_;
  thread_local std::vector<double> buf;
  thread_local std::vector<fft::Complex> spec;
  buf.assign(embed_, 0.0);
  spec.resize(f.spectrum_size());
  std::copy(x.begin(), x.end(), buf.begin());
  f.forward(buf, spec);
  for (std::size_t k = 0; k < spec.size(); ++k) spec[k] *= spectrum[k];
  f.inverse(spec, buf);
  std::copy_n(buf.begin(), n, y.begin());
}

void ToeplitzOp::apply(std::span<const double> x, std::span<double> y) const {
  const std::size_t n = col_.size();
  check_len(n, x.size(), "ToeplitzOp::apply input");
  check_len(n, y.size(), "ToeplitzOp::apply output");
  if (embed_ == 0) {
    thread_local std::vector<double> tmp;
    tmp.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) tmp[i] += entry(i, j) * x[j];
    std::copy(tmp.begin(), tmp.end(), y.begin());
    return;
  }
  apply_with(spectrum_, x, y);
}

std::vector<double> ToeplitzOp::apply(std::span<const double> x) const {
  std::vector<double> y(col_.size());
  apply(x, y);
  return y;
}

void ToeplitzOp::apply_transpose(std::span<const double> x, std::span<double> y) const {
  const std::size_t n = col_.size();
  check_len(n, x.size(), "ToeplitzOp::apply_transpose input");
  check_len(n, y.size(), "ToeplitzOp::apply_transpose output");
  if (embed_ == 0) {
    thread_local std::vector<double> tmp;
    tmp.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) tmp[i] += entry(j, i) * x[j];
    std::copy(tmp.begin(), tmp.end(), y.begin());
    return;
  }
  apply_with(spectrum_tr_, x, y);
}

LowerTriToeplitzOp::LowerTriToeplitzOp(std::vector<double> first_col) {
  if (first_col.empty()) throw std::invalid_argument("LowerTriToeplitzOp needs a non-empty first column");
  std::vector<double> row(first_col.size(), 0.0);
  row[0] = first_col[0];
  op_ = ToeplitzOp(std::move(first_col), std::move(row));
}

HankelOp::HankelOp(std::vector<double> antidiag) : antidiag_(std::move(antidiag)) {
  if (antidiag_.empty() || antidiag_.size() % 2 == 0) throw std::invalid_argument("HankelOp needs 2n-1 antidiagonals");
  const std::size_t n = size();
  // (H J)_{ij} = d_{n-1+i-j}.
  std::vector<double> col(n), row(n);
  for (std::size_t k = 0; k < n; ++k) {
    col[k] = antidiag_[n - 1 + k];
    row[k] = antidiag_[n - 1 - k];
  }
  flipped_ = ToeplitzOp(std::move(col), std::move(row));
}

HankelOp HankelOp::tau_correction(std::span<const double> t) {
  const std::size_t n = t.size();
  if (n == 0) throw std::invalid_argument("HankelOp::tau_correction needs a non-empty column");
  std::vector<double> d(2 * n - 1, 0.0);
  // d_k = t_{k+2} for k <= n-3, mirrored as d_{2n-2-k}; the three middle antidiagonals stay zero.
  for (std::size_t k = 0; k + 3 <= n; ++k) {
    d[k] = t[k + 2];
    d[2 * n - 2 - k] = t[k + 2];
  }
  return HankelOp(std::move(d));
}

void HankelOp::apply(std::span<const double> x, std::span<double> y) const {
  const std::size_t n = size();
  check_len(n, x.size(), "HankelOp::apply input");
  check_len(n, y.size(), "HankelOp::apply output");
  thread_local std::vector<double> rev;
  rev.assign(x.rbegin(), x.rend());
  flipped_.apply(rev, y);
}

TauOp::TauOp(std::vector<double> gen_col) : gen_col_(std::move(gen_col)) {
  const std::size_t n = gen_col_.size();
  if (n == 0) throw std::invalid_argument("TauOp needs a non-empty generator");
  dst_ = std::make_shared<const fft::SineTransform>(n);
  std::vector<double> num(n), den(n), e1(n, 0.0);
  e1[0] = 1.0;
  dst_->apply(gen_col_, num);
  dst_->apply(e1, den);
  eigvals_.resize(n);
  for (std::size_t k = 0; k < n; ++k) eigvals_[k] = num[k] / den[k];
}

void TauOp::apply_power(double power, std::span<const double> x, std::span<double> y) const {
  const std::size_t n = size();
  check_len(n, x.size(), "TauOp::apply_power input");
  check_len(n, y.size(), "TauOp::apply_power output");
  const bool integral = power == std::floor(power) && power >= 0.0;
  thread_local std::vector<double> z;
  z.resize(n);
  dst_->apply(x, z);
  for (std::size_t k = 0; k < n; ++k) {
    const double lam = eigvals_[k];
    if (!integral && !(lam > 0.0)) throw std::domain_error("TauOp: non-positive eigenvalue for a fractional or negative power");
    z[k] *= power == 1.0 ? lam : power == -1.0 ? 1.0 / lam : power == 0.5 ? std::sqrt(lam) : power == -0.5 ? 1.0 / std::sqrt(lam) : std::pow(lam, power);
  }
  dst_->apply(z, y);
}

std::vector<double> TauOp::apply_power(double power, std::span<const double> x) const {
  std::vector<double> y(size());
  apply_power(power, x, y);
  return y;
}

double TauOp::entry(std::size_t i, std::size_t j) const {
  const std::size_t n = size();
  const double s = 2.0 / static_cast<double>(n + 1);
  const double w = M_PI / static_cast<double>(n + 1);
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k)
    sum += eigvals_[k] * std::sin(w * static_cast<double>((i + 1) * (k + 1))) * std::sin(w * static_cast<double>((j + 1) * (k + 1)));
  return s * sum;
}

TauOp tau_from_toeplitz(const ToeplitzOp& T) {
  if (!T.is_symmetric()) throw std::invalid_argument("tau_from_toeplitz needs a symmetric Toeplitz matrix");
  const auto& t = T.first_col();
  const std::size_t n = t.size();
  std::vector<double> gen(t);
  for (std::size_t k = 0; k + 2 < n; ++k) gen[k] -= t[k + 2];
  return TauOp(std::move(gen));
}

std::vector<double> tau_solve(const TauOp& tau, double power, std::span<const double> v) { return tau.apply_power(power, v); }

std::vector<double> tri_toeplitz_multiply(std::span<const double> a, std::span<const double> b) {
  check_len(a.size(), b.size(), "tri_toeplitz_multiply");
  return truncated_convolution(a, b, a.size());
}

LowerTriToeplitzOp tri_toeplitz_invert(const LowerTriToeplitzOp& L) {
  const auto& l = L.first_col();
  const std::size_t n = l.size();
  if (l[0] == 0.0) throw std::domain_error("tri_toeplitz_invert: zero diagonal");
  std::vector<double> x(n, 0.0);
  if (n <= kDirectLimit) {
    x[0] = 1.0 / l[0];
    for (std::size_t i = 1; i < n; ++i) {
      double s = 0.0;
      for (std::size_t k = 1; k <= i; ++k) s += l[k] * x[i - k];
      x[i] = -s / l[0];
    }
    return LowerTriToeplitzOp(std::move(x));
  }

  // The epsilon-circulant C = L + eps U on the order-m extension is diagonalized by
  // D^{-1} F with D = diag(theta^k), theta^m = eps; its inverse's first column agrees
  // with L^{-1} e_1 up to O(eps).
  const std::size_t m = fft::next_pow2(n);
  const double eps = std::sqrt(std::numeric_limits<double>::epsilon());
  const double log_theta = std::log(eps) / static_cast<double>(m);
  fft::RealFft f(m);
  std::vector<double> buf(m, 0.0);
  for (std::size_t k = 0; k < n; ++k) buf[k] = l[k] * std::exp(log_theta * static_cast<double>(k));
  std::vector<fft::Complex> spec(f.spectrum_size());
  f.forward(buf, spec);
  for (auto& s : spec) {
    if (s == fft::Complex(0.0, 0.0)) throw std::domain_error("tri_toeplitz_invert: singular epsilon-circulant");
    s = 1.0 / s;
  }
  f.inverse(spec, buf);
  for (std::size_t k = 0; k < n; ++k) x[k] = buf[k] * std::exp(-log_theta * static_cast<double>(k));

  // Newton: X <- X - X (L X - I).
  std::vector<double> r = truncated_convolution(l, x, n);
  r[0] -= 1.0;
  const std::vector<double> corr = truncated_convolution(x, r, n);
  for (std::size_t k = 0; k < n; ++k) x[k] -= corr[k];
  return LowerTriToeplitzOp(std::move(x));
}

GsfInverse::GsfInverse(const ToeplitzOp& T, double tol, int max_iter) {
  if (!T.is_symmetric()) throw std::invalid_argument("GsfInverse needs a symmetric Toeplitz matrix");
  const std::size_t n = T.size();
  std::vector<double> e1(n, 0.0);
  e1[0] = 1.0;

  LinearOp op = [&T](std::span<const double> v, std::span<double> out) { T.apply(v, out); };
  LinearOp pre;
  const TauOp tau = tau_from_toeplitz(T);
  if (std::all_of(tau.eigvals().begin(), tau.eigvals().end(), [](double v) { return v > 0.0; }))
    pre = [&tau](std::span<const double> v, std::span<double> out) { tau.apply_power(-1.0, v, out); };
  SolverConfig cfg;
  cfg.tol = tol;
  cfg.max_iter = max_iter;
  SolveResult res = cg(op, e1, cfg, pre);
  if (!res.report.converged) throw std::runtime_error("GsfInverse: generator solve did not converge");
  iterations_ = res.report.iterations;
  const std::vector<double>& x = res.x;
  if (!(x[0] > 0.0)) throw std::runtime_error("GsfInverse: generator has non-positive leading entry");
  inv_x0_ = 1.0 / x[0];
  // Z J x = [0, x_{n-1}, ..., x_1].
  std::vector<double> zjx(n, 0.0);
  for (std::size_t k = 1; k < n; ++k) zjx[k] = x[n - k];
  lx_ = LowerTriToeplitzOp(x);
  lzy_ = LowerTriToeplitzOp(std::move(zjx));
}

void GsfInverse::apply(std::span<const double> v, std::span<double> out) const {
  const std::size_t n = lx_.size();
  check_len(n, v.size(), "GsfInverse::apply input");
  check_len(n, out.size(), "GsfInverse::apply output");
  std::vector<double> a(n), b(n), c(n);
  lx_.apply_transpose(v, a);
  lx_.apply(a, b);
  lzy_.apply_transpose(v, a);
  lzy_.apply(a, c);
  for (std::size_t k = 0; k < n; ++k) out[k] = inv_x0_ * (b[k] - c[k]);
}

std::vector<double> GsfInverse::apply(std::span<const double> v) const {
  std::vector<double> out(lx_.size());
  apply(v, out);
  return out;
}

std::vector<double> gsf_inverse_apply(const ToeplitzOp& T, std::span<const double> v) { return GsfInverse(T).apply(v); }

void write_first_col_csv(const std::string& path, std::span<const double> col) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "index,value\n" << std::setprecision(17);
  for (std::size_t i = 0; i < col.size(); ++i) out << i << ',' << col[i] << '\n';
}

}  // namespace faao
