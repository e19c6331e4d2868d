// Acceptance run: one PASS/FAIL line per criterion, details indented above it.
// Exit status is nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "faao/analysis.hpp"
#include "faao/precond.hpp"
#include "faao/solver.hpp"
#include "faao/toeplitz.hpp"
#include "faao/weights.hpp"
#include "oracles.hpp"

using namespace faao;

namespace {

// Pinned tolerances.
constexpr double kErrRelTol = 0.05;
constexpr double kOrderTol = 0.1;
constexpr double kCondRelTol = 0.01;
constexpr int kIterSlack = 2;
constexpr int kIterSpread = 2;
constexpr double kUnprecRelTol = 0.20;
constexpr int kIter2D = 6;
constexpr double kFastApplyTol = 1e-10;
constexpr double kBiniTol = 1e-9;
constexpr double kStarterTol = 1e-8;
constexpr double kDoublingRatio = 3.0;

struct Pair {
  double alpha, beta;
};

constexpr Pair kPairs[] = {{0.1, 1.1}, {0.2, 1.7}, {0.35, 1.5}, {0.9, 1.9}};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool within_rel(double got, double want, double tol) { return std::abs(got - want) <= tol * std::abs(want); }

const char* mark(bool ok) { return ok ? "ok  " : "MISS"; }

// Example 1, alpha = 0.1, beta = 1.5, N = ceil(M^{(3-alpha)/2}).
bool time_convergence() {
  const double want_err[] = {3.3558e-4, 4.2391e-5, 5.3517e-6, 6.7403e-7, 9.2695e-8};
  const std::vector<int> Ms{10, 20, 40, 80, 160};
  const auto t0 = std::chrono::steady_clock::now();
  const ProblemSpec base = ProblemSpec::for_example(ExampleId::kExample1, 0.1, 1.5, 10, 10);
  const auto rows = time_ladder(base, Ms, SolverKind::kPbicgstab);
  bool ok = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& e = rows[i].errors;
    bool row_ok = within_rel(e.err_inf, want_err[i], kErrRelTol) && rows[i].report.converged;
    if (e.order_inf) row_ok = row_ok && std::abs(*e.order_inf - (3.0 - 0.1)) <= kOrderTol;
    ok = ok && row_ok;
    std::printf("  %s M=%4d N=%5d err_inf=%.4e (ref %.4e) order=%s\n", mark(row_ok), rows[i].M, rows[i].N, e.err_inf,
                want_err[i], e.order_inf ? std::to_string(*e.order_inf).c_str() : "--");
  }
  const double secs = seconds_since(t0);
  std::printf("  wall %.1f s\n", secs);
  return ok;
}

// Example 1, alpha = 0.9, beta = 1.9, M = 1024.
bool space_convergence() {
  const double want_err[] = {5.4166e-3, 1.3277e-3, 3.2529e-4, 7.9708e-5, 1.9545e-5};
  const std::vector<int> Ns{10, 20, 40, 80, 160};
  const auto t0 = std::chrono::steady_clock::now();
  const ProblemSpec base = ProblemSpec::for_example(ExampleId::kExample1, 0.9, 1.9, 1024, 10);
  const auto rows = space_ladder(base, Ns, SolverKind::kPbicgstab);
  bool ok = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& e = rows[i].errors;
    bool row_ok = within_rel(e.err_inf, want_err[i], kErrRelTol) && rows[i].report.converged;
    if (e.order_inf) row_ok = row_ok && std::abs(*e.order_inf - 2.0) <= kOrderTol;
    ok = ok && row_ok;
    std::printf("  %s N=%4d err_inf=%.4e (ref %.4e) order=%s\n", mark(row_ok), rows[i].N, e.err_inf, want_err[i],
                e.order_inf ? std::to_string(*e.order_inf).c_str() : "--");
  }
  std::printf("  wall %.1f s\n", seconds_since(t0));
  return ok;
}

// Example 2, M = N in {128, 256, 512}. Reference iteration counts; 0 marks non-convergence.
bool iteration_robustness() {
  const int prec_ref[4][3] = {{5, 5, 5}, {4, 5, 5}, {5, 5, 5}, {4, 4, 4}};
  const int plain_ref[4][3] = {{61, 89, 137}, {233, 438, 829}, {189, 310, 569}, {0, 0, 0}};
  const int Ns[] = {128, 256, 512};
  bool ok = true;
  for (int p = 0; p < 4; ++p) {
    int lo = 1 << 30, hi = 0;
    for (int k = 0; k < 3; ++k) {
      const ProblemSpec spec = ProblemSpec::for_example(ExampleId::kExample2, kPairs[p].alpha, kPairs[p].beta, Ns[k], Ns[k]);
      const auto t0 = std::chrono::steady_clock::now();
      const AllAtOnceSystem sys = build_system(spec, Ordering::kSpaceMajor);
      const SolveResult pre = solve_system(sys, SolverKind::kPbicgstab);
      const SolveResult plain = solve_system(sys, SolverKind::kBicgstab);
      const int it = pre.report.iterations;
      lo = std::min(lo, it);
      hi = std::max(hi, it);
      const bool pre_ok = pre.report.converged && it <= prec_ref[p][k] + kIterSlack;
      bool plain_ok;
      if (plain_ref[p][k] == 0) {
        plain_ok = plain.report.flagged_dag;
      } else {
        plain_ok = plain.report.converged && within_rel(plain.report.iterations, plain_ref[p][k], kUnprecRelTol);
      }
      ok = ok && pre_ok && plain_ok;
      const std::string plain_str = plain.report.flagged_dag ? "dag" : std::to_string(plain.report.iterations);
      const std::string plain_want = plain_ref[p][k] == 0 ? "dag" : std::to_string(plain_ref[p][k]);
      std::printf("  %s (%.2g, %.2g) N=%3d P: Iter1=%.1f Iter2=%d (ref %d)  I: Iter2=%s (ref %s)  %.1f s\n",
                  mark(pre_ok && plain_ok), kPairs[p].alpha, kPairs[p].beta, Ns[k], sys.starter().mean_iterations(), it,
                  prec_ref[p][k], plain_str.c_str(), plain_want.c_str(), seconds_since(t0));
    }
    const bool spread_ok = hi - lo <= kIterSpread;
    ok = ok && spread_ok;
    std::printf("  %s (%.2g, %.2g) Iter2 spread %d\n", mark(spread_ok), kPairs[p].alpha, kPairs[p].beta, hi - lo);
  }
  return ok;
}

// Example 2, dense kappa_2 at M = N in {16, 32, 64}.
bool condition_numbers() {
  const double sys_ref[4][3] = {{9.86, 20.63, 43.64}, {38.04, 123.25, 400.27}, {25.02, 68.98, 192.69},
                                {70.45, 243.78, 870.27}};
  const double pre_ref[4][3] = {{1.23, 1.30, 1.36}, {1.12, 1.15, 1.18}, {1.17, 1.22, 1.27}, {1.04, 1.06, 1.07}};
  const int Ns[] = {16, 32, 64};
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  for (int p = 0; p < 4; ++p)
    for (int k = 0; k < 3; ++k) {
      const ProblemSpec spec = ProblemSpec::for_example(ExampleId::kExample2, kPairs[p].alpha, kPairs[p].beta, Ns[k], Ns[k]);
      const AllAtOnceSystem sys = build_system(spec, Ordering::kSpaceMajor);
      const double km = condition_number(MatrixTag::kSystem, sys, CondMethod::kDense).kappa2;
      const double kp = condition_number(MatrixTag::kBilateral, sys, CondMethod::kDense).kappa2;
      bool row_ok = within_rel(km, sys_ref[p][k], kCondRelTol) && within_rel(kp, pre_ref[p][k], kCondRelTol);
      if (kPairs[p].alpha < L2Weights::kSignPatternAlpha) row_ok = row_ok && kp < 2.0 * std::sqrt(3.0);
      ok = ok && row_ok;
      std::printf("  %s (%.2g, %.2g) N=%2d kappa(M)=%.2f (ref %.2f) kappa(P)=%.3f (ref %.2f)\n", mark(row_ok),
                  kPairs[p].alpha, kPairs[p].beta, Ns[k], km, sys_ref[p][k], kp, pre_ref[p][k]);
    }
  std::printf("  wall %.1f s\n", seconds_since(t0));
  return ok;
}

// Example 3: PBiCGSTAB counts at M = N in {16, 32, 64}; dense kappa_2 at N in {8, 16}.
bool two_dimensional() {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  for (const Pair& pr : kPairs)
    for (int N : {16, 32, 64}) {
      const ProblemSpec spec = ProblemSpec::for_example(ExampleId::kExample3, pr.alpha, pr.beta, N, N);
      const AllAtOnceSystem sys = build_system(spec, Ordering::kSpaceMajor);
      const SolveResult res = solve_system(sys, SolverKind::kPbicgstab);
      const bool row_ok = res.report.converged && res.report.iterations <= kIter2D;
      ok = ok && row_ok;
      std::printf("  %s (%.2g, %.2g) N=%2d Iter1=%.1f Iter2=%d\n", mark(row_ok), pr.alpha, pr.beta, N,
                  sys.starter().mean_iterations(), res.report.iterations);
    }
  // Rows repeating another row verbatim are reported but not compared.
  struct Ref {
    double sys, pre;
    bool duplicate;
  };
  const Ref refs[4][2] = {{{5.83, 1.20, false}, {12.50, 1.28, false}},
                          {{26.71, 1.36, true}, {49.93, 1.14, false}},
                          {{11.40, 1.15, false}, {32.43, 1.21, false}},
                          {{22.78, 1.04, false}, {22.78, 1.04, true}}};
  const int Ns[] = {8, 16};
  for (int p = 0; p < 4; ++p)
    for (int k = 0; k < 2; ++k) {
      const ProblemSpec spec = ProblemSpec::for_example(ExampleId::kExample3, kPairs[p].alpha, kPairs[p].beta, Ns[k], Ns[k]);
      const AllAtOnceSystem sys = build_system(spec, Ordering::kSpaceMajor);
      const double km = condition_number(MatrixTag::kSystem, sys, CondMethod::kDense).kappa2;
      const double kp = condition_number(MatrixTag::kBilateral, sys, CondMethod::kDense).kappa2;
      const Ref& r = refs[p][k];
      if (r.duplicate) {
        std::printf("  skip (%.2g, %.2g) N=%2d kappa(M)=%.2f kappa(P)=%.3f (reference row duplicated, not compared)\n",
                    kPairs[p].alpha, kPairs[p].beta, Ns[k], km, kp);
        continue;
      }
      const bool row_ok = within_rel(km, r.sys, kCondRelTol) && within_rel(kp, r.pre, kCondRelTol);
      ok = ok && row_ok;
      std::printf("  %s (%.2g, %.2g) N=%2d kappa(M)=%.2f (ref %.2f) kappa(P)=%.3f (ref %.2f)\n", mark(row_ok),
                  kPairs[p].alpha, kPairs[p].beta, Ns[k], km, r.sys, kp, r.pre);
    }
  std::printf("  wall %.1f s\n", seconds_since(t0));
  return ok;
}

bool check(const char* label, bool ok, const std::string& detail) {
  std::printf("  %s (%s) %s\n", mark(ok), label, detail.c_str());
  return ok;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

bool properties() {
  bool ok = true;

  // (a) fast applies against dense oracles.
  double worst = 0.0;
  for (int n : {8, 33, 64, 128}) {
    const auto col = oracle::random_vector(n, n), x = oracle::random_vector(n, n + 1);
    auto row = oracle::random_vector(n, n + 2);
    row[0] = col[0];
    const ToeplitzOp T(col, row);
    worst = std::max(worst, oracle::rel_err(T.apply(x), oracle::to_std(oracle::toeplitz(col, row) * oracle::to_eigen(x))));
    std::vector<double> y(n);
    fft::dst1(x, y);
    worst = std::max(worst, oracle::rel_err(y, oracle::to_std(oracle::dst_matrix(n) * oracle::to_eigen(x))));
    const TauOp tau = tau_from_toeplitz(ToeplitzOp::symmetric(riesz_stencil(1.5, n + 1).g));
    const Eigen::MatrixXd Gt = oracle::g_tau(1.5, n + 1);
    worst = std::max(worst, oracle::rel_err(tau.apply_power(1.0, x), oracle::to_std(Gt * oracle::to_eigen(x))));
    worst = std::max(worst, oracle::rel_err(tau.apply_power(-1.0, x), oracle::to_std(Gt.ldlt().solve(oracle::to_eigen(x)))));
  }
  ok &= check("a", worst <= kFastApplyTol, fmt("Toeplitz/DST/tau applies vs dense, max rel err %.2e", worst));

  // (b) Bini inversion on the time blocks that occur in practice and on decaying random columns.
  worst = 0.0;
  for (int n : {16, 100, 256}) {
    std::vector<double> col = oracle::random_vector(n, 3 * n, -0.3, 0.3);
    for (int k = 1; k < n; ++k) col[k] /= static_cast<double>(k) * k;
    col[0] = 1.5;
    std::vector<double> e1(n, 0.0);
    e1[0] = 1.0;
    worst = std::max(worst, oracle::rel_err(tri_toeplitz_invert(LowerTriToeplitzOp(col)).first_col(),
                                            oracle::forward_substitution(col, e1)));
    const L2Weights w(0.3, n + 1);
    for (double mu : {1e-3, 1.0, 1e3}) {
      std::vector<double> s(n);
      for (int k = 0; k < n; ++k) s[k] = (k == 0 ? w.c_plain()[0] : w.c_plain()[k] - w.c_plain()[k - 1]) / std::sqrt(mu);
      s[0] += std::sqrt(mu);
      worst = std::max(worst, oracle::rel_err(tri_toeplitz_invert(LowerTriToeplitzOp(s)).first_col(),
                                              oracle::forward_substitution(s, e1)));
    }
  }
  ok &= check("b", worst <= kBiniTol, fmt("Bini vs forward substitution, max rel err %.2e", worst));

  // (c) spectrum of G_tau^{-1} G_beta.
  double lo = 1e300, hi = -1e300;
  for (double beta : {1.1, 1.5, 1.9})
    for (int N : {8, 16, 32, 64}) {
      Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(oracle::g_beta(beta, N), oracle::g_tau(beta, N));
      lo = std::min(lo, es.eigenvalues().minCoeff());
      hi = std::max(hi, es.eigenvalues().maxCoeff());
    }
  ok &= check("c", lo > 0.5 && hi < 1.5, "tau-preconditioned spectrum in [" + fmt("%.4f", lo) + ", " + fmt("%.4f", hi) + "]");

  // (d) A_t + A_t^T positive definite.
  double min_eig = 1e300;
  for (int i = 1; i <= 7; ++i)
    for (int M : {3, 10, 50, 100, 200}) {
      const double alpha = 0.05 * i;
      const ProblemSpec spec = ProblemSpec::for_example(ExampleId::kExample1, alpha, 1.5, M, 8);
      const Eigen::MatrixXd A = assemble_At(L2Weights(alpha, M), spec).dense();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A + A.transpose());
      min_eig = std::min(min_eig, es.eigenvalues().minCoeff() / A(0, 0));
    }
  ok &= check("d", min_eig > 0.0, fmt("min eig of A_t + A_t^T (scaled by A_11) %.3e", min_eig));

  // (e) coefficient sign patterns.
  bool signs = true;
  for (int i = 1; i <= 99; ++i) {
    const L2Weights w(0.01 * i, 102);
    for (int l = 0; l <= 101; ++l) {
      signs &= w.a()[l] > 0 && w.b()[l] > 0;
      if (l > 0) signs &= w.a()[l] < w.a()[l - 1] && w.b()[l] < w.b()[l - 1];
    }
    if (0.01 * i < L2Weights::kSignPatternAlpha) signs &= w.sign_pattern_holds(100);
  }
  ok &= check("e", signs, "a, b positive decreasing on alpha = 0.01..0.99; c, c~ pattern below the threshold");

  // (f) fast-L1 starter vs direct L1.
  worst = 0.0;
  for (const auto& [id, alpha, beta, M, N] :
       {std::tuple{ExampleId::kExample1, 0.5, 1.5, 10, 32}, std::tuple{ExampleId::kExample2, 0.2, 1.7, 20, 64},
        std::tuple{ExampleId::kExample1, 0.9, 1.9, 20, 64}, std::tuple{ExampleId::kExample3, 0.35, 1.5, 8, 8}}) {
    const ProblemSpec spec = ProblemSpec::for_example(id, alpha, beta, M, N);
    const SpatialOperator S(spec.beta, spec.N, spec.dims, spec.kappa);
    const StarterSolution st = solve_starter(spec, S);
    worst = std::max(worst, oracle::rel_err(st.u1, oracle::direct_l1_starter(spec, st.tau_hat, st.M_hat)));
  }
  ok &= check("f", worst <= kStarterTol, fmt("starter vs direct L1, max rel err %.2e", worst));

  // (g) Rayleigh quotients of the preconditioned operator.
  lo = 1e300;
  hi = -1e300;
  for (const Pair& pr : kPairs) {
    if (pr.alpha >= L2Weights::kSignPatternAlpha) continue;
    const ProblemSpec spec = ProblemSpec::for_example(ExampleId::kExample2, pr.alpha, pr.beta, 16, 16);
    const AllAtOnceSystem sys = build_system(spec, Ordering::kSpaceMajor);
    const Eigen::MatrixXd K = dense_matrix(MatrixTag::kBilateral, sys);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (K + K.transpose()));
    lo = std::min(lo, es.eigenvalues().minCoeff());
    hi = std::max(hi, es.eigenvalues().maxCoeff());
  }
  ok &= check("g", lo > 0.25 && hi < 3.0, "Rayleigh quotients in [" + fmt("%.4f", lo) + ", " + fmt("%.4f", hi) + "]");
  return ok;
}

// Doubling N at fixed M must less than triple the preconditioned solve time.
bool scaling() {
  const int M = 256;
  std::vector<double> times;
  for (int N : {256, 512, 1024}) {
    const ProblemSpec spec = ProblemSpec::for_example(ExampleId::kExample2, 0.2, 1.7, M, N);
    const AllAtOnceSystem sys = build_system(spec, Ordering::kSpaceMajor);
    double best = 1e300;
    int iters = 0;
    for (int rep = 0; rep < 3; ++rep) {
      const auto t0 = std::chrono::steady_clock::now();
      const SolveResult res = solve_system(sys, SolverKind::kPbicgstab);
      best = std::min(best, seconds_since(t0));
      iters = res.report.iterations;
    }
    times.push_back(best);
    std::printf("  M=%d N=%4d Iter2=%d best of 3: %.3f s\n", M, N, iters, best);
  }
  bool ok = true;
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double r = times[i] / times[i - 1];
    const bool step_ok = r < kDoublingRatio;
    ok = ok && step_ok;
    std::printf("  %s ratio %.2f\n", mark(step_ok), r);
  }
  return ok;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<bool()>>> criteria{
      {"time convergence, Example 1 (0.1, 1.5), M = 10..160", time_convergence},
      {"space convergence, Example 1 (0.9, 1.9), M = 1024, N = 10..160", space_convergence},
      {"iteration robustness, Example 2, M = N <= 512", iteration_robustness},
      {"condition numbers, Example 2, M = N in {16, 32, 64}", condition_numbers},
      {"2D extension, Example 3", two_dimensional},
      {"property suite (a)-(g)", properties},
      {"PBiCGSTAB time scaling in N at fixed M", scaling},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    std::printf("criterion %zu: %s\n", i + 1, criteria[i].first);
    std::fflush(stdout);
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = false;
    try {
      ok = criteria[i].second();
    } catch (const std::exception& e) {
      std::printf("  exception: %s\n", e.what());
    }
    std::printf("%s criterion %zu (%.1f s)\n", ok ? "PASS" : "FAIL", i + 1, seconds_since(t0));
    std::fflush(stdout);
    failed += ok ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
