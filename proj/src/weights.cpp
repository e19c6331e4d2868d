#include "faao/weights.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <stdexcept>
#include <utility>

namespace faao {

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
}

// (l+1)^p - l^p without cancellation.
double forward_power_diff(double p, double l) {
  if (l == 0.0) return 1.0;
  return std::pow(l, p) * std::expm1(p * std::log1p(1.0 / l));
}

// Beyond this index b_l is summed from its large-l expansion
//   b_l = sum_{k>=3} binom(p, k-1) (1/k - 1/2) l^{p+1-k},  p = 1 - alpha,
// which avoids the cancellation between the integral and trapezoid parts.
constexpr std::size_t kSeriesStart = 2;

using NodesWeights = std::pair<std::vector<double>, std::vector<double>>;

// Golub-Welsch for the Jacobi weight (1-x)^a (1+x)^b on [-1,1].
NodesWeights gauss_jacobi(int n, double a, double b) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  const double ab = a + b;
  for (int k = 0; k < n; ++k) {
    const double d = 2.0 * k + ab;
    J(k, k) = (k == 0 && std::abs(ab) < 1e-14) ? (b - a) / (ab + 2.0) : (b * b - a * a) / (d * (d + 2.0));
    if (k + 1 < n) {
      const double m = k + 1.0;
      const double dm = 2.0 * m + ab;
      const double off = std::sqrt(4.0 * m * (m + a) * (m + b) * (m + ab) / (dm * dm * (dm + 1.0) * (dm - 1.0)));
      J(k, k + 1) = off;
      J(k + 1, k) = off;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  const double mu0 = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(a + 1.0) + std::lgamma(b + 1.0) - std::lgamma(ab + 2.0));
  NodesWeights out;
  out.first.resize(n);
  out.second.resize(n);
  for (int k = 0; k < n; ++k) {
    out.first[k] = es.eigenvalues()(k);
    const double v = es.eigenvectors()(0, k);
    out.second[k] = mu0 * v * v;
  }
  return out;
}

double max_sampled_error(const SoeKernel& soe, std::size_t samples) {
  const double lo = std::log(soe.t_min);
  const double hi = std::log(soe.t_max);
  const std::size_t count = (soe.t_max > soe.t_min && samples > 1) ? samples : 1;
  double worst = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const double t = count == 1 ? soe.t_min : std::exp(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1));
    worst = std::max(worst, std::abs(soe.eval(t) - std::pow(t, -soe.alpha)));
  }
  return worst;
}

}  // namespace

double l2_a(double alpha, std::size_t l) { return forward_power_diff(1.0 - alpha, static_cast<double>(l)); }

double l2_b(double alpha, std::size_t l) {
  const double p = 1.0 - alpha;
  const double x = static_cast<double>(l);
  if (l < kSeriesStart) {
    const double integral = l == 0 ? 1.0 / (p + 1.0) : std::pow(x, p + 1.0) * std::expm1((p + 1.0) * std::log1p(1.0 / x)) / (p + 1.0);
    const double trapezoid = 0.5 * (std::pow(x + 1.0, p) + (l == 0 ? 0.0 : std::pow(x, p)));
    return integral - trapezoid;
  }
  double binom = p;  // binom(p, k-1) at k = 2
  double power = std::pow(x, p - 1.0);
  double sum = 0.0;
  for (int k = 3; k < 80; ++k) {
    binom *= (p - (k - 2)) / static_cast<double>(k - 1);
    power /= x;
    const double term = binom * (1.0 / k - 0.5) * power;
    sum += term;
    if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

L2Weights::L2Weights(double alpha, int M) : alpha_(alpha), M_(M) {
  check_alpha(alpha);
  if (M < 2) throw std::invalid_argument("L2Weights needs M >= 2");
  const auto n = static_cast<std::size_t>(M);
  a_.resize(n + 1);
  b_.resize(n + 1);
  for (std::size_t l = 0; l <= n; ++l) {
    a_[l] = l2_a(alpha, l);
    b_[l] = l2_b(alpha, l);
  }
  c_.resize(n);
  ct_.resize(n);
  ch_.assign(n, 0.0);
  c_[0] = a_[0] + b_[0];
  ct_[0] = a_[0] + b_[0] + b_[1];
  for (std::size_t k = 1; k < n; ++k) {
    c_[k] = a_[k] + b_[k] - b_[k - 1];
    ct_[k] = a_[k] + b_[k] + b_[k + 1] - b_[k - 1];
    ch_[k] = a_[k] - b_[k] - b_[k - 1];
  }
}

std::vector<double> L2Weights::c_row(int j) const {
  if (j < 1 || j > M_ - 1) throw std::out_of_range("c_row level out of range");
  std::vector<double> row(static_cast<std::size_t>(j) + 1);
  if (j == 1) {
    row[0] = ct_[0];
    row[1] = ch_[1];
    return row;
  }
  row[0] = c_[0];
  for (int s = 1; s <= j - 2; ++s) row[s] = c_[s];
  row[j - 1] = ct_[j - 1];
  row[j] = ch_[j];
  return row;
}

bool L2Weights::sign_pattern_holds(int kmax) const {
  const int top = std::min(kmax, M_ - 2);
  for (int k = 0; k <= top; ++k) {
    if (!(c_[k] > 0.0) || !(ct_[k] > 0.0)) return false;
    if (!(c_[k + 1] - c_[k] < 0.0)) return false;
    if (!(ct_[k + 1] - c_[k] < 0.0)) return false;
  }
  return true;
}

L2Weights l2_weights(double alpha, int M) { return L2Weights(alpha, M); }

RieszStencil riesz_stencil(double beta, int N) {
  if (!(beta > 1.0 && beta < 2.0)) throw std::invalid_argument("beta must lie in (1,2)");
  if (N < 3) throw std::invalid_argument("riesz_stencil needs N >= 3");
  RieszStencil st;
  st.beta = beta;
  st.g.resize(static_cast<std::size_t>(N) - 1);
  st.g[0] = std::exp(std::lgamma(1.0 + beta) - 2.0 * std::lgamma(beta / 2.0 + 1.0));
  for (std::size_t k = 0; k + 1 < st.g.size(); ++k) {
    const double kk = static_cast<double>(k);
    st.g[k + 1] = st.g[k] * (kk - beta / 2.0) / (kk + beta / 2.0 + 1.0);
  }
  return st;
}

double SoeKernel::eval(double t) const {
  double sum = 0.0;
  for (std::size_t l = 0; l < weights.size(); ++l) sum += weights[l] * std::exp(-exponents[l] * t);
  return sum;
}

SoeKernel build_soe(double alpha, double tau_hat, double t_window, double eps, const SoeOptions& options) {
  check_alpha(alpha);
  if (!(eps > 0.0)) throw std::invalid_argument("SOE tolerance must be positive");
  if (!(tau_hat > 0.0) || t_window < tau_hat) throw std::invalid_argument("SOE window must satisfy 0 < tau_hat <= t_window");

  const double gamma_alpha = std::tgamma(alpha);
  // [0, 2^lo] has s * t_window <= 1, so a low-order Gauss-Jacobi rule resolves it.
  const int lo = static_cast<int>(std::floor(std::log2(1.0 / t_window)));
  int hi = lo;
  for (;;) {
    const double s = std::ldexp(1.0, hi);
    const double tail = std::exp(-tau_hat * s) * std::pow(s, alpha - 1.0) / (tau_hat * gamma_alpha);
    if (tail <= 0.25 * eps) break;
    ++hi;
    if (hi - lo > 200) throw std::runtime_error("SOE tail bound did not converge");
  }

  SoeKernel soe;
  soe.alpha = alpha;
  soe.t_min = tau_hat;
  soe.t_max = t_window;
  soe.eps = eps;

  const double delta = std::ldexp(1.0, lo);
  for (int q = 4; q <= 64; ++q) {
    soe.weights.clear();
    soe.exponents.clear();
    const auto [xj, wj] = gauss_jacobi(q, 0.0, alpha - 1.0);
    for (int i = 0; i < q; ++i) {
      const double u = 0.5 * (1.0 + xj[i]);
      soe.exponents.push_back(delta * u);
      soe.weights.push_back(std::pow(delta, alpha) * std::pow(2.0, -alpha) * wj[i] / gamma_alpha);
    }
    const auto [xl, wl] = gauss_jacobi(q, 0.0, 0.0);
    for (int j = lo; j < hi; ++j) {
      const double left = std::ldexp(1.0, j);
      for (int i = 0; i < q; ++i) {
        const double s = left * (1.5 + 0.5 * xl[i]);
        soe.exponents.push_back(s);
        soe.weights.push_back(0.5 * left * wl[i] * std::pow(s, alpha - 1.0) / gamma_alpha);
      }
    }
    soe.max_error = max_sampled_error(soe, options.samples);
    if (soe.max_error > eps) {
      // The rule only gets longer from here; give up once the full rule is past the cap.
      if (soe.count() > 2 * options.max_terms + 64) break;
      continue;
    }

    // Merge away terms whose largest contribution on the window is negligible.
    SoeKernel pruned = soe;
    pruned.weights.clear();
    pruned.exponents.clear();
    const double drop = 0.1 * eps / static_cast<double>(soe.count());
    for (std::size_t l = 0; l < soe.count(); ++l) {
      if (soe.weights[l] * std::exp(-soe.exponents[l] * tau_hat) >= drop) {
        pruned.weights.push_back(soe.weights[l]);
        pruned.exponents.push_back(soe.exponents[l]);
      }
    }
    pruned.max_error = max_sampled_error(pruned, options.samples);
    SoeKernel& best = pruned.max_error <= eps ? pruned : soe;
    if (best.count() <= options.max_terms) return best;
    break;
  }
  throw std::runtime_error("SOE approximation could not reach the tolerance within " + std::to_string(options.max_terms) +
                           " terms");
}

std::vector<double> fast_l1_weights(double alpha, double tau_hat, const SoeKernel& soe, int j) {
  check_alpha(alpha);
  if (j < 1) throw std::invalid_argument("fast_l1_weights needs j >= 1");
  std::vector<double> out(static_cast<std::size_t>(j), 0.0);
  out.back() = std::pow(tau_hat, -alpha) / (1.0 - alpha);
  for (std::size_t l = 0; l < soe.count(); ++l) {
    const double x = tau_hat * soe.exponents[l];
    const double first = x == 0.0 ? 1.0 : -std::expm1(-x) / x;
    const double decay = std::exp(-x);
    // b_k for k = j-1 down to 1 picks up one more decay factor per step.
    double factor = soe.weights[l] * first * decay;
    for (int k = j - 1; k >= 1; --k) {
      out[static_cast<std::size_t>(k) - 1] += factor;
      factor *= decay;
    }
  }
  return out;
}

void write_weights_csv(const std::string& path, std::span<const double> values, std::size_t first_index) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "index,value\n" << std::setprecision(17);
  for (std::size_t i = 0; i < values.size(); ++i) out << first_index + i << ',' << values[i] << '\n';
}

}  // namespace faao
