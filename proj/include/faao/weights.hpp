#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace faao {

/// Coefficient families of the L2-type Caputo approximation.
///
///   a_l = (l+1)^{1-a} - l^{1-a}
///   b_l = [(l+1)^{2-a} - l^{2-a}]/(2-a) - [(l+1)^{1-a} + l^{1-a}]/2
///   c_0 = a_0 + b_0,  c_s = a_s + b_s - b_{s-1}              (interior levels)
///   ct_0 = a_0 + b_0 + b_1,  ct_k = a_k + b_k + b_{k+1} - b_{k-1}
///   ch_k = a_k - b_k - b_{k-1}
class L2Weights {
 public:
  L2Weights(double alpha, int M);

  double alpha() const { return alpha_; }
  int levels() const { return M_; }

  // Indices 0..M inclusive.
  const std::vector<double>& a() const { return a_; }
  const std::vector<double>& b() const { return b_; }
  // Indices 0..M-1.
  const std::vector<double>& c_plain() const { return c_; }
  const std::vector<double>& c_tilde() const { return ct_; }
  // Index 0 unused (stored as 0); 1..M-1.
  const std::vector<double>& c_hat() const { return ch_; }

  // {c_s}_{s=0..j} of the formula at level t_{j+1}, j = 1..M-1, with its three cases
  // j = 1, j = 2 and j >= 3.
  std::vector<double> c_row(int j) const;

  // Sign pattern of the coefficient families up to index kmax: c_k > 0, c_{k+1} < c_k,
  // ct_k > 0, ct_{k+1} < c_k. Guaranteed for alpha below kSignPatternAlpha.
  bool sign_pattern_holds(int kmax) const;

  // Upper bound on alpha for which the sign pattern (and the positivity of A_t + A_t^T) is proven.
  static constexpr double kSignPatternAlpha = 0.3624;

 private:
  double alpha_;
  int M_;
  std::vector<double> a_, b_, c_, ct_, ch_;
};

// Stable single-coefficient evaluations (used by L2Weights and by the tests).
double l2_a(double alpha, std::size_t l);
double l2_b(double alpha, std::size_t l);

L2Weights l2_weights(double alpha, int M);

/// Fractional centered-difference weights
/// g_k = (-1)^k Gamma(1+b) / (Gamma(b/2 - k + 1) Gamma(b/2 + k + 1)), g_{-k} = g_k.
struct RieszStencil {
  double beta = 1.5;
  std::vector<double> g;  // g_0 .. g_{N-2}

  double operator[](long k) const { return g[static_cast<std::size_t>(k < 0 ? -k : k)]; }
};

RieszStencil riesz_stencil(double beta, int N);

/// Sum-of-exponentials approximation sum_l w_l exp(-s_l t) of the kernel t^{-alpha}
/// on [t_min, t_max].
struct SoeKernel {
  double alpha = 0.5;
  double t_min = 0.0;
  double t_max = 0.0;
  double eps = 0.0;        // requested absolute tolerance
  double max_error = 0.0;  // sampled absolute error actually achieved
  std::vector<double> weights;
  std::vector<double> exponents;

  std::size_t count() const { return weights.size(); }
  double eval(double t) const;
};

struct SoeOptions {
  std::size_t max_terms = 256;
  std::size_t samples = 1000;
};

/// Builds the SOE kernel from the Gamma-integral representation
///   t^{-a} = 1/Gamma(a) int_0^inf exp(-t s) s^{a-1} ds,
/// with Gauss-Jacobi quadrature on [0, 2^lo] and Gauss-Legendre on dyadic intervals
/// [2^j, 2^{j+1}]. The per-interval order grows until the sampled error is <= eps.
/// Throws std::runtime_error if that needs more than options.max_terms terms.
SoeKernel build_soe(double alpha, double tau_hat, double t_window, double eps, const SoeOptions& options = {});

/// Fast-L1 history weights {b_k^{(j)}}_{k=1..j} at step j of size tau_hat:
///   b_j = tau_hat^{-a}/(1-a),
///   b_k = sum_l w_l (1 - e^{-tau_hat s_l}) e^{-tau_hat s_l (j-k)} / (tau_hat s_l),  k < j.
/// Entry k-1 of the result holds b_k.
std::vector<double> fast_l1_weights(double alpha, double tau_hat, const SoeKernel& soe, int j);

/// Writes an (index, value) CSV table.
void write_weights_csv(const std::string& path, std::span<const double> values, std::size_t first_index = 0);

}  // namespace faao
