#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace faao::fft {

using Complex = std::complex<double>;

/// Smallest power of two >= n (n >= 1).
std::size_t next_pow2(std::size_t n);

/// Real-to-complex transform of length m (unnormalized forward, 1/m-normalized inverse).
/// Plans are shared process-wide; execute() calls are reentrant.
class RealFft {
 public:
  explicit RealFft(std::size_t m);

  std::size_t size() const { return m_; }
  std::size_t spectrum_size() const { return m_ / 2 + 1; }

  // in: m reals, out: m/2+1 complex.
  void forward(std::span<const double> in, std::span<Complex> out) const;
  // in: m/2+1 complex (not modified), out: m reals, scaled by 1/m.
  void inverse(std::span<const Complex> in, std::span<double> out) const;

 private:
  std::size_t m_;
  void* fwd_;
  void* inv_;
};

/// Orthonormal DST-I applied along `dims` spatial axes of side n each.
///
/// Data layout is space-major with `inner` contiguous entries per spatial node, i.e.
/// element (i[, k], j) lives at ((i * n [+ k]) * inner + j). With Q_{ij} = sqrt(2/(n+1))
/// sin(ij pi/(n+1)) the transform computes (Q [x] Q) x I_inner, which is its own inverse.
class SineTransform {
 public:
  SineTransform(std::size_t n, int dims = 1, std::size_t inner = 1);

  std::size_t side() const { return n_; }
  std::size_t length() const { return total_; }

  void apply(std::span<const double> in, std::span<double> out) const;

 private:
  std::size_t n_;
  int dims_;
  std::size_t inner_;
  std::size_t total_;
  double scale_;
  void* plan_;
};

/// Convenience single-vector orthonormal DST-I.
void dst1(std::span<const double> in, std::span<double> out);

}  // namespace faao::fft
