#include "faao/analysis.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <stdexcept>

namespace faao {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void normalize(std::vector<double>& v) {
  const double n = std::sqrt(dot(v, v));
  if (n == 0.0) throw std::runtime_error("condition estimate: zero iterate");
  for (double& x : v) x /= n;
}

const AllAtOnceSystem& space_major(const AllAtOnceSystem& sys, std::optional<AllAtOnceSystem>& holder) {
  if (sys.ordering() == Ordering::kSpaceMajor) return sys;
  holder.emplace(sys.reordered(Ordering::kSpaceMajor));
  return *holder;
}

struct OperatorPair {
  LinearOp forward;
  LinearOp transpose;
};

OperatorPair system_operators(MatrixTag tag, const AllAtOnceSystem& sys, const BilateralPreconditioner* P) {
  const std::size_t n = sys.size();
  auto M = [&sys](std::span<const double> v, std::span<double> o) { system_matvec(sys, v, o); };
  auto Mt = [&sys](std::span<const double> v, std::span<double> o) { system_matvec_transpose(sys, v, o); };
  switch (tag) {
    case MatrixTag::kSystem:
      return {M, Mt};
    case MatrixTag::kLeftPreconditioned:
      return {[&sys, P, n](std::span<const double> v, std::span<double> o) {
                std::vector<double> a(n);
                system_matvec(sys, v, a);
                P->apply_Pl_inv(a, o);
              },
              [&sys, P, n](std::span<const double> v, std::span<double> o) {
                std::vector<double> a(n);
                P->apply_Pl_inv_transpose(v, a);
                system_matvec_transpose(sys, a, o);
              }};
    case MatrixTag::kRightPreconditioned:
      return {[&sys, P, n](std::span<const double> v, std::span<double> o) {
                std::vector<double> a(n);
                P->apply_Pr_inv(v, a);
                system_matvec(sys, a, o);
              },
              [&sys, P, n](std::span<const double> v, std::span<double> o) {
                std::vector<double> a(n);
                system_matvec_transpose(sys, v, a);
                P->apply_Pr_inv_transpose(a, o);
              }};
    case MatrixTag::kBilateral:
      return {[&sys, P](std::span<const double> v, std::span<double> o) { P->apply_preconditioned_operator(sys, v, o); },
              [&sys, P, n](std::span<const double> v, std::span<double> o) {
                std::vector<double> a(n), b(n);
                P->apply_Pl_inv_transpose(v, a);
                system_matvec_transpose(sys, a, b);
                P->apply_Pr_inv_transpose(b, o);
              }};
    default:
      throw std::invalid_argument("the iterative condition estimate supports system-level tags only");
  }
}

bool needs_preconditioner(MatrixTag tag) {
  return tag == MatrixTag::kLeftPreconditioned || tag == MatrixTag::kRightPreconditioned || tag == MatrixTag::kBilateral;
}

}  // namespace

ErrorReport compute_errors(const SolutionField& numeric, const ProblemSpec& spec) {
  const SolutionField exact = exact_field(spec);
  if (numeric.values.size() != exact.values.size()) throw std::invalid_argument("compute_errors: level count mismatch");
  const double h = spec.h();
  const double w = spec.dims == 1 ? h : h * h;
  ErrorReport r;
  for (std::size_t j = 1; j < exact.values.size(); ++j) {
    const auto& a = numeric.values[j];
    const auto& b = exact.values[j];
    if (a.size() != b.size()) throw std::invalid_argument("compute_errors: grid mismatch");
    double sq = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double e = std::abs(a[i] - b[i]);
      r.err_inf = std::max(r.err_inf, e);
      sq += e * e;
    }
    r.err_2 = std::max(r.err_2, std::sqrt(w * sq));
  }
  return r;
}

void fill_orders(std::vector<ErrorReport>& reports, const std::vector<double>& steps) {
  if (reports.size() != steps.size()) throw std::invalid_argument("fill_orders: one step per report required");
  for (std::size_t k = 1; k < reports.size(); ++k) {
    if (!(steps[k] > 0.0) || steps[k] == steps[k - 1]) throw std::invalid_argument("fill_orders: steps must differ");
    const double lr = std::log(steps[k - 1] / steps[k]);
    reports[k].order_inf = std::log(reports[k - 1].err_inf / reports[k].err_inf) / lr;
    reports[k].order_2 = std::log(reports[k - 1].err_2 / reports[k].err_2) / lr;
  }
}

std::string to_string(MatrixTag tag) {
  switch (tag) {
    case MatrixTag::kSystem: return "M";
    case MatrixTag::kLeftPreconditioned: return "PlinvM";
    case MatrixTag::kRightPreconditioned: return "MPrinv";
    case MatrixTag::kBilateral: return "PlinvMPrinv";
    case MatrixTag::kTimeSymmetric: return "AtPlusAtT";
    case MatrixTag::kTauPreconditionedSpace: return "GtauinvGbeta";
  }
  return "unknown";
}

MatrixTag parse_matrix_tag(const std::string& name) {
  for (MatrixTag t : {MatrixTag::kSystem, MatrixTag::kLeftPreconditioned, MatrixTag::kRightPreconditioned,
                      MatrixTag::kBilateral, MatrixTag::kTimeSymmetric, MatrixTag::kTauPreconditionedSpace})
    if (to_string(t) == name) return t;
  throw std::invalid_argument("unknown matrix tag: " + name);
}

Eigen::MatrixXd dense_materialize(const LinearOp& op, std::size_t n) {
  if (n > kDenseGuard) throw std::length_error("dense_materialize: operator exceeds the dense size guard");
  const auto ni = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd D(ni, ni);
  std::vector<double> e(n, 0.0), col(n);
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = 1.0;
    op(e, col);
    e[j] = 0.0;
    for (std::size_t i = 0; i < n; ++i) D(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = col[i];
  }
  return D;
}

Eigen::MatrixXd dense_matrix(MatrixTag tag, const AllAtOnceSystem& sys_in) {
  if (tag == MatrixTag::kTimeSymmetric) {
    const Eigen::MatrixXd A = sys_in.At().dense();
    return A + A.transpose();
  }
  if (tag == MatrixTag::kTauPreconditionedSpace) {
    const Eigen::MatrixXd S = sys_in.spatial().dense();
    const Eigen::MatrixXd T = sys_in.spatial().dense_tau();
    return T.llt().solve(S);
  }
  if (sys_in.size() > kDenseGuard) throw std::length_error("dense_matrix: system exceeds the dense size guard");
  std::optional<AllAtOnceSystem> holder;
  const AllAtOnceSystem& sys = space_major(sys_in, holder);
  if (tag == MatrixTag::kSystem) return dense_system(sys);
  const BilateralPreconditioner P(sys);
  return dense_materialize(system_operators(tag, sys, &P).forward, sys.size());
}

std::vector<double> singular_values(const Eigen::MatrixXd& A) {
  const Eigen::BDCSVD<Eigen::MatrixXd> svd(A);
  const Eigen::VectorXd& s = svd.singularValues();
  return {s.data(), s.data() + s.size()};
}

std::vector<std::complex<double>> eigenvalues(const Eigen::MatrixXd& A) {
  if (A.rows() != A.cols()) throw std::invalid_argument("eigenvalues: matrix must be square");
  const Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigenvalues: QR iteration did not converge");
  const Eigen::VectorXcd& w = es.eigenvalues();
  return {w.data(), w.data() + w.size()};
}

SpectrumReport condition_number(MatrixTag tag, const AllAtOnceSystem& sys_in, CondMethod method,
                                const IterativeCondOptions& opt) {
  SpectrumReport rep;
  rep.tag = tag;
  if (method == CondMethod::kDense) {
    rep.singular_values = singular_values(dense_matrix(tag, sys_in));
    rep.kappa2 = rep.singular_values.front() / rep.singular_values.back();
    return rep;
  }

  std::optional<AllAtOnceSystem> holder;
  const AllAtOnceSystem& sys = space_major(sys_in, holder);
  std::optional<BilateralPreconditioner> P;
  if (needs_preconditioner(tag)) P.emplace(sys);
  const OperatorPair ops = system_operators(tag, sys, P ? &*P : nullptr);
  const std::size_t n = sys.size();
  const LinearOp normal = [&ops, n](std::span<const double> v, std::span<double> o) {
    std::vector<double> a(n);
    ops.forward(v, a);
    ops.transpose(a, o);
  };

  std::mt19937_64 rng(20170101);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> start(n);
  for (double& v : start) v = dist(rng);
  normalize(start);

  // Largest eigenvalue of B^T B by power iteration.
  std::vector<double> x = start, y(n);
  double lam_max = 0.0;
  bool done = false;
  for (int k = 0; k < opt.max_outer && !done; ++k) {
    normal(x, y);
    const double lam = dot(x, y);
    done = k > 0 && std::abs(lam - lam_max) <= opt.tol * std::abs(lam);
    lam_max = lam;
    x = y;
    normalize(x);
  }
  if (!done) throw std::runtime_error("condition estimate: power iteration stagnated");

  // Smallest eigenvalue by inverse iteration with inner CG solves.
  SolverConfig inner;
  inner.tol = opt.inner_tol;
  inner.max_iter = opt.inner_max_iter;
  x = start;
  double mu = 0.0;
  done = false;
  for (int k = 0; k < opt.max_outer && !done; ++k) {
    const SolveResult res = cg(normal, x, inner);
    const double m = dot(x, res.x);
    done = k > 0 && std::abs(m - mu) <= opt.tol * std::abs(m);
    mu = m;
    x = res.x;
    normalize(x);
  }
  if (!done) throw std::runtime_error("condition estimate: inverse iteration stagnated");
  const double lam_min = 1.0 / mu;
  rep.singular_values = {std::sqrt(lam_max), std::sqrt(lam_min)};
  rep.kappa2 = std::sqrt(lam_max / lam_min);
  return rep;
}

SpectrumReport spectrum_dump(MatrixTag tag, const AllAtOnceSystem& sys, const std::string& csv_path) {
  SpectrumReport rep;
  rep.tag = tag;
  const Eigen::MatrixXd D = dense_matrix(tag, sys);
  rep.eigenvalues = eigenvalues(D);
  std::sort(rep.eigenvalues.begin(), rep.eigenvalues.end(), [](auto a, auto b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  rep.singular_values = singular_values(D);
  rep.kappa2 = rep.singular_values.front() / rep.singular_values.back();
  if (!csv_path.empty()) {
    std::ofstream out(csv_path);
    if (!out) throw std::runtime_error("cannot open " + csv_path);
    out << "re,im\n" << std::setprecision(17);
    for (const auto& z : rep.eigenvalues) out << z.real() << ',' << z.imag() << '\n';
  }
  return rep;
}

}  // namespace faao
