#include <gtest/gtest.h>

#include <cmath>

#include "faao/precond.hpp"
#include "oracles.hpp"

using faao::ExampleId;
using faao::Ordering;
using faao::ProblemSpec;
using oracle::random_vector;
using oracle::rel_err;
using oracle::to_eigen;
using oracle::to_std;

namespace {

faao::AllAtOnceSystem space_major(double alpha, double beta, int M, int N, int dims = 1) {
  const ProblemSpec spec =
      ProblemSpec::for_example(dims == 1 ? ExampleId::kExample1 : ExampleId::kExample3, alpha, beta, M, N);
  return faao::build_system(spec, Ordering::kSpaceMajor);
}

// Dense S_tau in the system's spatial layout.
Eigen::MatrixXd dense_tau(const faao::AllAtOnceSystem& sys) { return sys.spatial().dense_tau(); }

using Apply = void (faao::BilateralPreconditioner::*)(std::span<const double>, std::span<double>) const;

Eigen::MatrixXd materialize(const faao::BilateralPreconditioner& P, Apply f) {
  const std::size_t n = P.size();
  Eigen::MatrixXd D(n, n);
  std::vector<double> e(n, 0.0), col(n);
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = 1.0;
    (P.*f)(e, col);
    D.col(static_cast<Eigen::Index>(j)) = to_eigen(col);
    e[j] = 0.0;
  }
  return D;
}

}  // namespace

TEST(Bilateral, RightInverseMatchesDense) {
  for (int dims : {1, 2}) {
    const auto sys = space_major(0.3, 1.5, 6, 7, dims);
    const auto P = faao::build_preconditioner(sys);
    const Eigen::MatrixXd It = Eigen::MatrixXd::Identity(sys.time_size(), sys.time_size());
    const Eigen::MatrixXd want = oracle::kron(oracle::sym_power(dense_tau(sys), -0.5), It);
    EXPECT_LE((materialize(P, &faao::BilateralPreconditioner::apply_Pr_inv) - want).norm(), 1e-11 * want.norm());
  }
}

TEST(Bilateral, LeftInverseMatchesDense) {
  for (int dims : {1, 2}) {
    const auto sys = space_major(0.2, 1.7, 8, dims == 1 ? 8 : 5, dims);
    const auto P = faao::build_preconditioner(sys);
    const Eigen::MatrixXd St = dense_tau(sys);
    const Eigen::MatrixXd At = oracle::time_matrix(sys.spec());
    const Eigen::MatrixXd It = Eigen::MatrixXd::Identity(At.rows(), At.rows());
    const Eigen::MatrixXd Pl = oracle::kron(oracle::sym_power(St, -0.5), At) + oracle::kron(oracle::sym_power(St, 0.5), It);
    const Eigen::MatrixXd want = Pl.inverse();
    EXPECT_LE((materialize(P, &faao::BilateralPreconditioner::apply_Pl_inv) - want).norm(), 1e-10 * want.norm()) << dims;
    EXPECT_LE((materialize(P, &faao::BilateralPreconditioner::apply_Pl) - Pl).norm(), 1e-11 * Pl.norm()) << dims;
    EXPECT_LE((materialize(P, &faao::BilateralPreconditioner::apply_Pl_inv_transpose) - want.transpose()).norm(),
              1e-10 * want.norm());
  }
}

TEST(Bilateral, RoundTrips) {
  const auto sys = space_major(0.5, 1.5, 40, 33);
  const auto P = faao::build_preconditioner(sys);
  const auto v = random_vector(P.size(), 3);
  std::vector<double> a(v.size()), b(v.size());
  P.apply_Pr(v, a);
  P.apply_Pr_inv(a, b);
  EXPECT_LE(rel_err(b, v), 1e-10);
  P.apply_Pl(v, a);
  P.apply_Pl_inv(a, b);
  EXPECT_LE(rel_err(b, v), 1e-10);
}

TEST(Bilateral, SigmaBlocksMatchDense) {
  const auto sys = space_major(0.3, 1.5, 30, 9);
  const auto P = faao::build_preconditioner(sys);
  const Eigen::MatrixXd At = oracle::time_matrix(sys.spec());
  const Eigen::MatrixXd It = Eigen::MatrixXd::Identity(At.rows(), At.rows());
  for (std::size_t n = 0; n < P.eigenvalues().size(); ++n) {
    const double mu = P.eigenvalues()[n];
    ASSERT_GT(mu, 0.0);
    const Eigen::MatrixXd Sigma = std::sqrt(mu) * It + At / std::sqrt(mu);
    for (Eigen::Index i = 0; i < Sigma.rows(); ++i) EXPECT_GT(Sigma(i, i), 0.0);
    EXPECT_NEAR(P.sigma11_inv(n), 1.0 / Sigma(0, 0), 1e-13 / Sigma(0, 0));
    const auto y0 = random_vector(At.rows(), 5 + n);
    auto y = y0;
    P.sigma_solve(n, y);
    EXPECT_LE(rel_err(y, to_std(Sigma.triangularView<Eigen::Lower>().solve(to_eigen(y0)))), 1e-11) << n;
    y = y0;
    P.sigma_solve_transpose(n, y);
    EXPECT_LE(rel_err(y, to_std(Sigma.transpose().triangularView<Eigen::Upper>().solve(to_eigen(y0)))), 1e-11) << n;
  }
}

TEST(Bilateral, UncachedPathAgrees) {
  const auto sys = space_major(0.3, 1.5, 20, 17);
  const auto cached = faao::build_preconditioner(sys);
  faao::PreconditionerOptions opt;
  opt.memory_limit_bytes = 0;
  const auto lazy = faao::build_preconditioner(sys, opt);
  EXPECT_TRUE(cached.cached());
  EXPECT_FALSE(lazy.cached());
  const auto v = random_vector(cached.size(), 2);
  std::vector<double> a(v.size()), b(v.size());
  cached.apply_Pl_inv(v, a);
  lazy.apply_Pl_inv(v, b);
  EXPECT_LE(rel_err(a, b), 1e-14);
}

TEST(Bilateral, RejectsTimeMajorSystem) {
  const ProblemSpec spec = ProblemSpec::for_example(ExampleId::kExample1, 0.3, 1.5, 6, 6);
  EXPECT_THROW(faao::build_preconditioner(faao::build_system(spec, Ordering::kTimeMajor)), std::invalid_argument);
}

TEST(Bilateral, PreconditionedOperatorMatchesDense) {
  const auto sys = space_major(0.25, 1.5, 7, 6);
  const auto P = faao::build_preconditioner(sys);
  const Eigen::MatrixXd M = faao::dense_system(sys);
  const Eigen::MatrixXd L = materialize(P, &faao::BilateralPreconditioner::apply_Pl_inv);
  const Eigen::MatrixXd R = materialize(P, &faao::BilateralPreconditioner::apply_Pr_inv);
  const auto v = random_vector(P.size(), 4);
  std::vector<double> z(v.size());
  P.apply_preconditioned_operator(sys, v, z);
  EXPECT_LE(rel_err(z, to_std(L * M * R * to_eigen(v))), 1e-11);
}

// Rayleigh quotients of the preconditioned operator lie in (1/4, 3).
TEST(Bilateral, RayleighQuotientBounds) {
  for (double alpha : {0.1, 0.2, 0.35}) {
    const auto sys = space_major(alpha, 1.5, 16, 16);
    const auto P = faao::build_preconditioner(sys);
    const auto n = static_cast<Eigen::Index>(P.size());
    Eigen::MatrixXd K(n, n);
    std::vector<double> e(n, 0.0), col(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      e[j] = 1.0;
      P.apply_preconditioned_operator(sys, e, col);
      K.col(j) = to_eigen(col);
      e[j] = 0.0;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (K + K.transpose()));
    EXPECT_GT(es.eigenvalues().minCoeff(), 0.25) << alpha;
    EXPECT_LT(es.eigenvalues().maxCoeff(), 3.0) << alpha;
  }
}

TEST(Bilateral, SingularValuesBounded) {
  for (double alpha : {0.1, 0.2, 0.35})
    for (double beta : {1.1, 1.5, 1.7, 1.9})
      for (int N : {16, 32}) {
        const auto sys = space_major(alpha, beta, 16, N);
        const auto P = faao::build_preconditioner(sys);
        const auto n = static_cast<Eigen::Index>(P.size());
        Eigen::MatrixXd K(n, n);
        std::vector<double> e(n, 0.0), col(n);
        for (Eigen::Index j = 0; j < n; ++j) {
          e[j] = 1.0;
          P.apply_preconditioned_operator(sys, e, col);
          K.col(j) = to_eigen(col);
          e[j] = 0.0;
        }
        const Eigen::VectorXd sv = Eigen::BDCSVD<Eigen::MatrixXd>(K).singularValues();
        EXPECT_GT(sv.minCoeff(), 0.5) << alpha << " " << beta << " " << N;
        EXPECT_LT(sv.maxCoeff(), std::sqrt(3.0)) << alpha << " " << beta << " " << N;
      }
}

TEST(Bilateral, ExactWhenTauCorrectionVanishes) {
  // N = 3: the Hankel correction is empty, S_tau = S and P_l^{-1} M~ P_r^{-1} = I.
  const auto sys = space_major(0.3, 1.5, 9, 3);
  const auto P = faao::build_preconditioner(sys);
  ASSERT_EQ(P.eigenvalues().size(), 2u);
  EXPECT_LE((sys.spatial().dense_tau() - sys.spatial().dense()).norm(), 1e-15);
  const auto v = random_vector(P.size(), 1);
  std::vector<double> z(v.size());
  P.apply_preconditioned_operator(sys, v, z);
  EXPECT_LE(rel_err(z, v), 1e-12);
}
