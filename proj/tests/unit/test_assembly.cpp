#include <gtest/gtest.h>

#include <cmath>

#include "faao/assembly.hpp"
#include "faao/solver.hpp"
#include "oracles.hpp"

using faao::ExampleId;
using faao::Ordering;
using faao::ProblemSpec;
using oracle::random_vector;
using oracle::rel_err;
using oracle::to_eigen;
using oracle::to_std;

TEST(TimeMatrix, MatchesSchemeCoefficients) {
  for (double alpha : {0.2, 0.5, 0.9})
    for (int M : {3, 4, 6, 17}) {
      const ProblemSpec spec = ProblemSpec::for_example(ExampleId::kExample1, alpha, 1.5, M, 8);
      const faao::TimeBlockMatrix At = faao::assemble_At(faao::L2Weights(alpha, M), spec);
      const Eigen::MatrixXd want = oracle::time_matrix(spec);
      EXPECT_LE((At.dense() - want).norm(), 1e-13 * want.norm()) << alpha << " " << M;
      const auto x = random_vector(M - 1, 3);
      std::vector<double> y(M - 1);
      At.apply(x, y);
      EXPECT_LE(rel_err(y, to_std(want * to_eigen(x))), 1e-13);
      At.apply_transpose(x, y);
      EXPECT_LE(rel_err(y, to_std(want.transpose() * to_eigen(x))), 1e-13);
    }
}

TEST(TimeMatrix, SmallestBlockStructure) {
  const ProblemSpec spec = ProblemSpec::for_example(ExampleId::kExample1, 0.3, 1.5, 3, 8);
  const faao::L2Weights w(0.3, 3);
  const faao::TimeBlockMatrix At = faao::assemble_At(w, spec);
  const double s = At.scale();
  EXPECT_NEAR(s, std::pow(spec.h(), 1.5) * std::pow(spec.tau(), -0.3) / std::tgamma(1.7), 1e-14);
  const Eigen::MatrixXd D = At.dense();
  ASSERT_EQ(D.rows(), 2);
  EXPECT_NEAR(D(0, 0), s * w.c_tilde()[0], 1e-14);
  EXPECT_EQ(D(0, 1), 0.0);
  EXPECT_NEAR(D(1, 0), s * (w.c_tilde()[1] - w.c_plain()[0]), 1e-14);
  EXPECT_NEAR(D(1, 1), s * w.c_plain()[0], 1e-14);
}

TEST(TimeMatrix, RejectsTooFewLevels) {
  const ProblemSpec spec = ProblemSpec::for_example(ExampleId::kExample1, 0.3, 1.5, 2, 8);
  EXPECT_THROW(faao::assemble_At(faao::L2Weights(0.3, 2), spec), std::invalid_argument);
  EXPECT_THROW(faao::build_system(spec, Ordering::kTimeMajor), std::invalid_argument);
}

// A_t + A_t^T is positive definite for alpha up to 0.35.
TEST(TimeMatrix, SymmetricPartPositiveDefinite) {
  for (double alpha : {0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35})
    for (int M : {3, 10, 50, 200}) {
      const ProblemSpec spec = ProblemSpec::for_example(ExampleId::kExample1, alpha, 1.5, M, 8);
      const Eigen::MatrixXd A = faao::assemble_At(faao::L2Weights(alpha, M), spec).dense();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A + A.transpose());
      EXPECT_GT(es.eigenvalues().minCoeff(), 0.0) << alpha << " " << M;
      for (Eigen::Index i = 0; i < A.rows(); ++i) EXPECT_GT(A(i, i), 0.0);
    }
}

TEST(TimeMatrix, GershgorinDiscsInRightHalfPlane) {
  const ProblemSpec spec = ProblemSpec::for_example(ExampleId::kExample1, 0.3, 1.5, 50, 8);
  const Eigen::MatrixXd A = faao::assemble_At(faao::L2Weights(0.3, 50), spec).dense();
  const Eigen::MatrixXd S = A + A.transpose();
  for (Eigen::Index i = 0; i < S.rows(); ++i) {
    const double radius = S.row(i).cwiseAbs().sum() - std::abs(S(i, i));
    EXPECT_LT(radius, S(i, i)) << i;
  }
}

TEST(Starter, MatchesDirectL1) {
  struct Case {
    ExampleId id;
    double alpha, beta;
    int M, N;
  };
  for (const Case& c : {Case{ExampleId::kExample1, 0.5, 1.5, 10, 32}, Case{ExampleId::kExample2, 0.2, 1.7, 20, 64},
                        Case{ExampleId::kExample1, 0.9, 1.2, 5, 16}}) {
    const ProblemSpec spec = ProblemSpec::for_example(c.id, c.alpha, c.beta, c.M, c.N);
    const faao::SpatialOperator S(spec.beta, spec.N, spec.dims, spec.kappa);
    const faao::StarterSolution st = faao::solve_starter(spec, S);
    ASSERT_TRUE(st.converged);
    EXPECT_NEAR(st.tau_hat * st.M_hat, spec.tau(), 1e-14);
    EXPECT_EQ(st.iterations.size(), static_cast<std::size_t>(st.M_hat));
    const auto want = oracle::direct_l1_starter(spec, st.tau_hat, st.M_hat);
    EXPECT_LE(rel_err(st.u1, want), 1e-8) << c.alpha << " " << c.M << " " << c.N;
    EXPECT_EQ(st.u0, oracle::sample(spec, 0.0, false));
  }
}

TEST(Starter, InnerSolversAgree) {
  const ProblemSpec spec = ProblemSpec::for_example(ExampleId::kExample1, 0.4, 1.6, 8, 32);
  const faao::SpatialOperator S(spec.beta, spec.N, 1, spec.kappa);
  faao::StarterOptions opt;
  const auto pcg = faao::solve_starter(spec, S, opt);
  opt.solver = faao::StarterSolver::kCg;
  const auto cg = faao::solve_starter(spec, S, opt);
  opt.solver = faao::StarterSolver::kGsf;
  const auto gsf = faao::solve_starter(spec, S, opt);
  EXPECT_LE(rel_err(cg.u1, pcg.u1), 1e-8);
  EXPECT_LE(rel_err(gsf.u1, pcg.u1), 1e-8);
  EXPECT_LE(pcg.mean_iterations(), cg.mean_iterations());
}

TEST(Starter, StepReadjustedOntoFirstLevel) {
  const ProblemSpec spec = ProblemSpec::for_example(ExampleId::kExample1, 0.5, 1.5, 16, 8);
  int steps = 0;
  const double th = faao::starter_step(spec, &steps);
  EXPECT_EQ(steps, static_cast<int>(std::floor(spec.tau() / std::pow(spec.tau(), 2.5 / 1.5))));
  EXPECT_NEAR(th * steps, spec.tau(), 1e-15);
}

namespace {

std::vector<double> dense_solve(const faao::AllAtOnceSystem& sys) {
  return to_std(faao::dense_system(sys).partialPivLu().solve(to_eigen(sys.rhs())));
}

}  // namespace

TEST(System, AllAtOnceMatchesTimeStepping) {
  for (const auto& [id, alpha, beta, M, N] :
       {std::tuple{ExampleId::kExample1, 0.5, 1.5, 10, 12}, std::tuple{ExampleId::kExample2, 0.9, 1.9, 7, 9},
        std::tuple{ExampleId::kExample3, 0.2, 1.4, 8, 8}}) {
    const ProblemSpec spec = ProblemSpec::for_example(id, alpha, beta, M, N);
    const faao::AllAtOnceSystem sys = faao::build_system(spec, Ordering::kTimeMajor);
    const auto want = oracle::time_stepping(spec, sys.starter().u0, sys.starter().u1);
    EXPECT_LE(rel_err(dense_solve(sys), want), 1e-11) << static_cast<int>(id);
  }
}

TEST(System, DenseMatchesKroneckerForm) {
  for (int dims : {1, 2}) {
    const ProblemSpec spec = ProblemSpec::for_example(dims == 1 ? ExampleId::kExample1 : ExampleId::kExample3, 0.3,
                                                      1.5, 8, 8);
    const faao::AllAtOnceSystem tm = faao::build_system(spec, Ordering::kTimeMajor);
    const Eigen::MatrixXd At = oracle::time_matrix(spec);
    const Eigen::MatrixXd S = oracle::spatial(spec);
    const Eigen::MatrixXd It = Eigen::MatrixXd::Identity(At.rows(), At.rows());
    const Eigen::MatrixXd Is = Eigen::MatrixXd::Identity(S.rows(), S.rows());
    const Eigen::MatrixXd Mt = oracle::kron(At, Is) + oracle::kron(It, S);
    EXPECT_LE((faao::dense_system(tm) - Mt).norm(), 1e-12 * Mt.norm()) << dims;
    const faao::AllAtOnceSystem sm = tm.reordered(Ordering::kSpaceMajor);
    const Eigen::MatrixXd Ms = oracle::kron(S, It) + oracle::kron(Is, At);
    EXPECT_LE((faao::dense_system(sm) - Ms).norm(), 1e-12 * Ms.norm()) << dims;
  }
}

TEST(System, RhsFromEtaAndSource) {
  const ProblemSpec spec = ProblemSpec::for_example(ExampleId::kExample2, 0.6, 1.3, 6, 7);
  const faao::AllAtOnceSystem sys = faao::build_system(spec, Ordering::kTimeMajor);
  const std::size_t n = sys.space_size();
  const double hb = std::pow(spec.h(), spec.beta);
  const double scale = hb * std::pow(spec.tau(), -spec.alpha) / std::tgamma(2 - spec.alpha);
  const auto& u0 = sys.starter().u0;
  const auto& u1 = sys.starter().u1;
  for (int j = 1; j <= spec.M - 1; ++j) {
    const auto c = oracle::c_row(spec.alpha, j);
    const auto f = oracle::sample(spec, (j + 1) * spec.tau(), true);
    for (std::size_t p = 0; p < n; ++p) {
      const double eta = scale * (c[j] * (u1[p] - u0[p]) - c[j - 1] * u1[p]);
      const std::size_t idx = (j - 1) * n + p;
      EXPECT_NEAR(sys.eta()[idx], eta, 1e-13 * (1 + std::abs(eta)));
      EXPECT_NEAR(sys.rhs()[idx], -eta + hb * f[p], 1e-12 * (1 + std::abs(hb * f[p])));
    }
  }
}

TEST(System, OrderingsAgreeAfterPermutation) {
  for (int dims : {1, 2}) {
    const ProblemSpec spec = ProblemSpec::for_example(dims == 1 ? ExampleId::kExample1 : ExampleId::kExample3, 0.45,
                                                      1.6, 9, 6);
    const faao::AllAtOnceSystem tm = faao::build_system(spec, Ordering::kTimeMajor);
    const faao::AllAtOnceSystem sm = tm.reordered(Ordering::kSpaceMajor);
    const std::size_t T = tm.time_size(), S = tm.space_size();
    const auto v = random_vector(tm.size(), 17);
    const auto vs = faao::permute(v, T, S, Ordering::kTimeMajor, Ordering::kSpaceMajor);
    const auto y_tm = faao::system_matvec(tm, v);
    const auto y_sm = faao::system_matvec(sm, vs);
    EXPECT_LE(rel_err(faao::permute(y_sm, T, S, Ordering::kSpaceMajor, Ordering::kTimeMajor), y_tm), 1e-13);
    EXPECT_LE(rel_err(faao::permute(sm.rhs(), T, S, Ordering::kSpaceMajor, Ordering::kTimeMajor), tm.rhs()), 0.0);

    std::vector<double> yt(tm.size());
    faao::system_matvec_transpose(tm, v, yt);
    EXPECT_LE(rel_err(yt, to_std(faao::dense_system(tm).transpose() * to_eigen(v))), 1e-13);
  }
}

TEST(Permute, RoundTripAndSmallExample) {
  const std::vector<double> v{0, 1, 2, 3};  // time-major, T=2 blocks of S=2
  const auto s = faao::permute(v, 2, 2, Ordering::kTimeMajor, Ordering::kSpaceMajor);
  EXPECT_EQ(s, (std::vector<double>{0, 2, 1, 3}));
  const auto x = random_vector(35, 1);
  EXPECT_EQ(faao::permute(faao::permute(x, 5, 7, Ordering::kTimeMajor, Ordering::kSpaceMajor), 5, 7,
                          Ordering::kSpaceMajor, Ordering::kTimeMajor),
            x);
  EXPECT_EQ(faao::permute(x, 5, 7, Ordering::kTimeMajor, Ordering::kTimeMajor), x);
}

TEST(Solution, ExtractAndFlattenRoundTrip) {
  for (int dims : {1, 2}) {
    const ProblemSpec spec = ProblemSpec::for_example(dims == 1 ? ExampleId::kExample2 : ExampleId::kExample3, 0.3,
                                                      1.5, 5, 6);
    for (Ordering o : {Ordering::kTimeMajor, Ordering::kSpaceMajor}) {
      const faao::AllAtOnceSystem sys = faao::build_system(spec, o);
      const auto x = random_vector(sys.size(), 2);
      const faao::SolutionField f = faao::extract_solution(sys, x);
      ASSERT_EQ(f.values.size(), 6u);
      const std::size_t side = 7;
      for (const auto& level : f.values) {
        ASSERT_EQ(level.size(), dims == 1 ? side : side * side);
        if (dims == 1) {
          EXPECT_EQ(level.front(), 0.0);
          EXPECT_EQ(level.back(), 0.0);
        } else {
          for (std::size_t k = 0; k < side; ++k) {
            EXPECT_EQ(level[k], 0.0);
            EXPECT_EQ(level[k * side], 0.0);
          }
        }
      }
      EXPECT_EQ(faao::flatten_solution(sys, f), x);
    }
  }
}

TEST(Solution, ExactFieldShapeAndValues) {
  const ProblemSpec spec = ProblemSpec::for_example(ExampleId::kExample1, 0.5, 1.5, 4, 4);
  const faao::SolutionField f = faao::exact_field(spec);
  ASSERT_EQ(f.values.size(), 5u);
  EXPECT_NEAR(f.values[4][2], faao::eval_exact(spec, 0.5, 1.0), 1e-15);
  faao::ProblemSpec custom = spec;
  custom.example_id = ExampleId::kCustom;
  custom.custom_source = [](double, double, double) { return 1.0; };
  EXPECT_THROW(faao::exact_field(custom), std::invalid_argument);
}

TEST(Solution, ConvergesTowardExact) {
  const ProblemSpec spec = ProblemSpec::for_example(ExampleId::kExample1, 0.3, 1.5, 16, 32);
  const faao::AllAtOnceSystem sys = faao::build_system(spec, Ordering::kTimeMajor);
  const auto x = dense_solve(sys);
  const faao::SolutionField f = faao::extract_solution(sys, x);
  const faao::SolutionField e = faao::exact_field(spec);
  double err = 0.0;
  for (std::size_t j = 0; j < f.values.size(); ++j)
    for (std::size_t i = 0; i < f.values[j].size(); ++i) err = std::max(err, std::abs(f.values[j][i] - e.values[j][i]));
  EXPECT_LT(err, 1e-3);
}
