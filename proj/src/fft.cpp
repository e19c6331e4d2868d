#include "faao/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace faao::fft {

namespace {

// FFTW planning is not thread-safe; execution with the new-array API is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

using PlanKey = std::tuple<int, std::size_t, std::size_t, int>;  // kind, n, inner, dims

std::map<PlanKey, fftw_plan>& plan_cache() {
  static std::map<PlanKey, fftw_plan> cache;
  return cache;
}

constexpr int kR2C = 0;
constexpr int kC2R = 1;
constexpr int kDst = 2;

constexpr unsigned kFlags = FFTW_ESTIMATE | FFTW_UNALIGNED;

fftw_plan get_plan(int kind, std::size_t n, std::size_t inner, int dims) {
  std::lock_guard<std::mutex> lock(planner_mutex());
  const PlanKey key{kind, n, inner, dims};
  auto& cache = plan_cache();
  if (auto it = cache.find(key); it != cache.end()) return it->second;

  fftw_plan plan = nullptr;
  const int ni = static_cast<int>(n);
  if (kind == kR2C) {
    std::vector<double> in(n);
    std::vector<fftw_complex> out(n / 2 + 1);
    plan = fftw_plan_dft_r2c_1d(ni, in.data(), out.data(), kFlags);
  } else if (kind == kC2R) {
    std::vector<fftw_complex> in(n / 2 + 1);
    std::vector<double> out(n);
    plan = fftw_plan_dft_c2r_1d(ni, in.data(), out.data(), kFlags | FFTW_DESTROY_INPUT);
  } else {
    std::size_t total = inner;
    for (int d = 0; d < dims; ++d) total *= n;
    std::vector<double> in(total);
    std::vector<double> out(total);
    int shape[2] = {ni, ni};
    fftw_r2r_kind kinds[2] = {FFTW_RODFT00, FFTW_RODFT00};
    const int stride = static_cast<int>(inner);
    plan = fftw_plan_many_r2r(dims, shape, static_cast<int>(inner), in.data(), nullptr, stride, 1, out.data(),
                              nullptr, stride, 1, kinds, kFlags | FFTW_PRESERVE_INPUT);
  }
  if (plan == nullptr) throw std::runtime_error("FFTW failed to create a plan");
  cache.emplace(key, plan);
  return plan;
}

}  // namespace

std::size_t next_pow2(std::size_t n) {
  std::size_t m = 1;
  while (m < n) m <<= 1;
  return m;
}

RealFft::RealFft(std::size_t m) : m_(m) {
  if (m == 0) throw std::invalid_argument("RealFft size must be positive");
  fwd_ = get_plan(kR2C, m, 1, 1);
  inv_ = get_plan(kC2R, m, 1, 1);
}

void RealFft::forward(std::span<const double> in, std::span<Complex> out) const {
  if (in.size() != m_ || out.size() != spectrum_size()) throw std::invalid_argument("RealFft::forward size mismatch");
  // r2c with FFTW_ESTIMATE preserves its input.
  fftw_execute_dft_r2c(static_cast<fftw_plan>(fwd_), const_cast<double*>(in.data()),
                       reinterpret_cast<fftw_complex*>(out.data()));
}

void RealFft::inverse(std::span<const Complex> in, std::span<double> out) const {
  if (in.size() != spectrum_size() || out.size() != m_) throw std::invalid_argument("RealFft::inverse size mismatch");
  thread_local std::vector<Complex> scratch;
  scratch.assign(in.begin(), in.end());
  fftw_execute_dft_c2r(static_cast<fftw_plan>(inv_), reinterpret_cast<fftw_complex*>(scratch.data()), out.data());
  const double s = 1.0 / static_cast<double>(m_);
  for (double& v : out) v *= s;
}

SineTransform::SineTransform(std::size_t n, int dims, std::size_t inner) : n_(n), dims_(dims), inner_(inner) {
  if (n == 0 || inner == 0) throw std::invalid_argument("SineTransform sizes must be positive");
  if (dims != 1 && dims != 2) throw std::invalid_argument("SineTransform supports 1 or 2 dimensions");
  total_ = inner;
  for (int d = 0; d < dims; ++d) total_ *= n;
  // FFTW's RODFT00 is 2 sum x_j sin(pi (j+1)(k+1)/(n+1)); rescale to the orthonormal matrix.
  scale_ = std::pow(1.0 / std::sqrt(2.0 * static_cast<double>(n + 1)), dims);
  plan_ = get_plan(kDst, n, inner, dims);
}

void SineTransform::apply(std::span<const double> in, std::span<double> out) const {
  if (in.size() != total_ || out.size() != total_) throw std::invalid_argument("SineTransform size mismatch");
  if (in.data() == out.data()) {
    thread_local std::vector<double> scratch;
    scratch.assign(in.begin(), in.end());
    fftw_execute_r2r(static_cast<fftw_plan>(plan_), scratch.data(), out.data());
  } else {
    fftw_execute_r2r(static_cast<fftw_plan>(plan_), const_cast<double*>(in.data()), out.data());
  }
  for (double& v : out) v *= scale_;
}

void dst1(std::span<const double> in, std::span<double> out) {
  SineTransform(in.size()).apply(in, out);
}

}  // namespace faao::fft
