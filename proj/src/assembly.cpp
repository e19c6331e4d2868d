#include "faao/assembly.hpp"

#include <cmath>
#include <memory>
#include <numeric>
#include <stdexcept>
#include <utility>

#include "faao/krylov.hpp"

namespace faao {

namespace {

void check_len(std::size_t expected, std::size_t got, const char* what) {
  if (expected != got) throw std::invalid_argument(std::string(what) + ": length mismatch");
}

double h_pow_beta(const ProblemSpec& spec) { return std::pow(spec.h(), spec.beta); }

// Embeds interior values into a full grid level with zero boundaries.
std::vector<double> embed_interior(std::span<const double> interior, std::size_t n, int dims) {
  const std::size_t side = n + 2;
  if (dims == 1) {
    std::vector<double> out(side, 0.0);
    for (std::size_t i = 0; i < n; ++i) out[i + 1] = interior[i];
    return out;
  }
  std::vector<double> out(side * side, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) out[(i + 1) * side + (k + 1)] = interior[i * n + k];
  return out;
}

std::vector<double> strip_boundary(std::span<const double> full, std::size_t n, int dims) {
  const std::size_t side = n + 2;
  if (dims == 1) return {full.begin() + 1, full.begin() + 1 + static_cast<std::ptrdiff_t>(n)};
  std::vector<double> out(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) out[i * n + k] = full[(i + 1) * side + (k + 1)];
  return out;
}

template <class F>
std::vector<double> sample_interior(const ProblemSpec& spec, F&& f) {
  const Grid grid = build_grid(spec);
  const std::size_t n = static_cast<std::size_t>(spec.N) - 1;
  if (spec.dims == 1) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = f(grid.nodes_x[i + 1], 0.0);
    return out;
  }
  std::vector<double> out(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) out[i * n + k] = f(grid.nodes_x[i + 1], grid.nodes_x[k + 1]);
  return out;
}

}  // namespace

TimeBlockMatrix::TimeBlockMatrix(double scale, double a11, std::vector<double> a12, LowerTriToeplitzOp a22)
    : scale_(scale), a11_(a11), a12_(std::move(a12)), a22_(std::move(a22)) {
  check_len(a12_.size(), a22_.size(), "TimeBlockMatrix A12/A22");
}

void TimeBlockMatrix::apply(std::span<const double> x, std::span<double> y) const {
  const std::size_t m = order();
  check_len(m, x.size(), "TimeBlockMatrix::apply input");
  check_len(m, y.size(), "TimeBlockMatrix::apply output");
  const double x0 = x[0];
  a22_.apply(x.subspan(1), y.subspan(1));
  for (std::size_t k = 1; k < m; ++k) y[k] += a12_[k - 1] * x0;
  y[0] = a11_ * x0;
}

void TimeBlockMatrix::apply_transpose(std::span<const double> x, std::span<double> y) const {
  const std::size_t m = order();
  check_len(m, x.size(), "TimeBlockMatrix::apply_transpose input");
  check_len(m, y.size(), "TimeBlockMatrix::apply_transpose output");
  double y0 = a11_ * x[0];
  for (std::size_t k = 1; k < m; ++k) y0 += a12_[k - 1] * x[k];
  a22_.apply_transpose(x.subspan(1), y.subspan(1));
  y[0] = y0;
}

Eigen::MatrixXd TimeBlockMatrix::dense() const {
  const auto m = static_cast<Eigen::Index>(order());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m);
  A(0, 0) = a11_;
  const auto& col = a22_.first_col();
  for (Eigen::Index r = 1; r < m; ++r) {
    A(r, 0) = a12_[static_cast<std::size_t>(r - 1)];
    for (Eigen::Index q = 1; q <= r; ++q) A(r, q) = col[static_cast<std::size_t>(r - q)];
  }
  return A;
}

TimeBlockMatrix assemble_At(const L2Weights& w, const ProblemSpec& spec) {
  const int M = spec.M;
  if (M < 3) throw std::invalid_argument("assemble_At needs M >= 3");
  if (w.levels() < M) throw std::invalid_argument("assemble_At: weights computed for fewer levels than M");
  const double scale = h_pow_beta(spec) * std::pow(spec.tau(), -spec.alpha) / std::tgamma(2.0 - spec.alpha);
  const auto& c = w.c_plain();
  const auto& ct = w.c_tilde();
  const auto m2 = static_cast<std::size_t>(M - 2);
  std::vector<double> a12(m2), col(m2);
  for (std::size_t k = 1; k <= m2; ++k) a12[k - 1] = scale * (ct[k] - c[k - 1]);
  col[0] = scale * c[0];
  for (std::size_t k = 1; k < m2; ++k) col[k] = scale * (c[k] - c[k - 1]);
  return TimeBlockMatrix(scale, scale * ct[0], std::move(a12), LowerTriToeplitzOp(std::move(col)));
}

std::string to_string(Ordering o) { return o == Ordering::kTimeMajor ? "time-major" : "space-major"; }

double StarterSolution::mean_iterations() const {
  if (iterations.empty()) return 0.0;
  return static_cast<double>(std::accumulate(iterations.begin(), iterations.end(), 0L)) /
         static_cast<double>(iterations.size());
}

double starter_step(const ProblemSpec& spec, int* steps) {
  const double t1 = spec.tau();
  const double raw = std::pow(t1, (3.0 - spec.alpha) / (2.0 - spec.alpha));
  // Guard the floor against t1/raw landing a rounding error below an integer.
  int count = static_cast<int>(std::floor(t1 / raw * (1.0 + 1e-12)));
  if (count < 1) count = 1;
  if (steps != nullptr) *steps = count;
  return t1 / count;
}

std::vector<double> initial_interior(const ProblemSpec& spec) {
  return sample_interior(spec, [&spec](double x, double y) { return eval_initial(spec, x, y); });
}

std::vector<double> source_interior(const ProblemSpec& spec, double t) {
  if (spec.dims == 1) return sample_interior(spec, [&spec, t](double x, double) { return eval_source(spec, x, t); });
  return sample_interior(spec, [&spec, t](double x, double y) { return eval_source(spec, x, y, t); });
}

StarterSolution solve_starter(const ProblemSpec& spec, const SpatialOperator& spatial, const StarterOptions& opt) {
  spec.validate();
  const double alpha = spec.alpha;
  const std::size_t n = spatial.size();
  check_len(spec.spatial_size(), n, "solve_starter spatial operator");

  StarterSolution out;
  out.tau_hat = starter_step(spec, &out.M_hat);
  const double th = out.tau_hat;
  const double t1 = spec.tau();
  const double hb = h_pow_beta(spec);
  const double g1a = std::tgamma(1.0 - alpha);

  const SoeKernel soe = build_soe(alpha, th, t1, opt.soe_rel_eps * std::pow(th, -alpha));
  out.soe_terms = soe.count();
  const std::size_t L = soe.count();
  std::vector<double> decay(L), phi(L);
  for (std::size_t l = 0; l < L; ++l) {
    const double x = th * soe.exponents[l];
    decay[l] = std::exp(-x);
    phi[l] = x == 0.0 ? 1.0 : -std::expm1(-x) / x;
  }

  const double bj = std::pow(th, -alpha) / (1.0 - alpha);
  const double shift = hb * bj / g1a;

  // Step matrix shift I + S, its tau preconditioner and (1D) the GSF inverse.
  const LinearOp op = [&spatial, shift](std::span<const double> v, std::span<double> o) {
    spatial.apply(v, o);
    for (std::size_t i = 0; i < v.size(); ++i) o[i] += shift * v[i];
  };
  std::vector<double> pre_diag(n);
  for (std::size_t i = 0; i < n; ++i) pre_diag[i] = 1.0 / (shift + spatial.tau_eigenvalues()[i]);
  const LinearOp pre = [&spatial, &pre_diag](std::span<const double> v, std::span<double> o) {
    std::vector<double> z(v.size());
    spatial.sine_transform(v, z);
    for (std::size_t i = 0; i < z.size(); ++i) z[i] *= pre_diag[i];
    spatial.sine_transform(z, o);
  };
  std::unique_ptr<GsfInverse> gsf;
  if (opt.solver == StarterSolver::kGsf) {
    if (spatial.dims() != 1) throw std::invalid_argument("the GSF starter path is 1D only");
    std::vector<double> col = spatial.toeplitz().first_col();
    for (double& v : col) v *= spatial.kappa();
    col[0] += shift;
    gsf = std::make_unique<GsfInverse>(ToeplitzOp::symmetric(std::move(col)), 1e-13, opt.max_iter);
    out.iterations.push_back(gsf->generator_iterations());
  }

  out.u0 = initial_interior(spec);
  std::vector<double> prev = out.u0;
  std::vector<double> cur(n), rhs(n), hist(n);
  std::vector<double> U(L * n, 0.0);  // SOE history states, term-major
  SolverConfig cfg;
  cfg.tol = opt.tol;
  cfg.max_iter = opt.max_iter;

  for (int j = 1; j <= out.M_hat; ++j) {
    std::fill(hist.begin(), hist.end(), 0.0);
    for (std::size_t l = 0; l < L; ++l) {
      const double w = soe.weights[l];
      const double* Ul = &U[l * n];
      for (std::size_t i = 0; i < n; ++i) hist[i] += w * Ul[i];
    }
    const std::vector<double> f = source_interior(spec, j * th);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = hb * f[i] + hb / g1a * (bj * prev[i] - hist[i]);

    if (gsf) {
      gsf->apply(rhs, cur);
    } else {
      const SolveResult res = cg(op, rhs, cfg, opt.solver == StarterSolver::kPcgTau ? pre : LinearOp{});
      out.iterations.push_back(res.report.iterations);
      out.converged = out.converged && res.report.converged;
      cur = res.x;
    }

    // U_l <- e^{-x_l} (U_l + phi_l (u^j - u^{j-1})).
    for (std::size_t l = 0; l < L; ++l) {
      double* Ul = &U[l * n];
      for (std::size_t i = 0; i < n; ++i) Ul[i] = decay[l] * (Ul[i] + phi[l] * (cur[i] - prev[i]));
    }
    std::swap(prev, cur);
  }
  out.u1 = prev;
  return out;
}

AllAtOnceSystem::AllAtOnceSystem(ProblemSpec spec, L2Weights weights, TimeBlockMatrix At, SpatialPtr spatial,
                                 StarterSolution starter, Ordering ordering)
    : spec_(std::move(spec)),
      weights_(std::move(weights)),
      At_(std::move(At)),
      spatial_(std::move(spatial)),
      starter_(std::move(starter)),
      ordering_(ordering) {
  const std::size_t T = time_size();
  const std::size_t S = space_size();
  check_len(S, starter_.u0.size(), "AllAtOnceSystem u0");
  check_len(S, starter_.u1.size(), "AllAtOnceSystem u1");
  const double scale = At_.scale();
  const double hb = h_pow_beta(spec_);
  const auto& ch = weights_.c_hat();
  const auto& ct = weights_.c_tilde();
  const Grid grid = build_grid(spec_);

  // Time-major first: block j (0-based) is the equation for u^{j+2}.
  std::vector<double> eta(T * S), rhs(T * S);
  for (std::size_t j = 0; j < T; ++j) {
    const std::vector<double> f = source_interior(spec_, grid.nodes_t[j + 2]);
    for (std::size_t p = 0; p < S; ++p) {
      const double u0 = starter_.u0[p];
      const double u1 = starter_.u1[p];
      const double e = scale * (ch[j + 1] * (u1 - u0) - ct[j] * u1);
      eta[j * S + p] = e;
      rhs[j * S + p] = -e + hb * f[p];
    }
  }
  if (ordering_ == Ordering::kTimeMajor) {
    eta_ = std::move(eta);
    rhs_ = std::move(rhs);
  } else {
    eta_ = permute(eta, T, S, Ordering::kTimeMajor, Ordering::kSpaceMajor);
    rhs_ = permute(rhs, T, S, Ordering::kTimeMajor, Ordering::kSpaceMajor);
  }
}

AllAtOnceSystem AllAtOnceSystem::reordered(Ordering target) const {
  return AllAtOnceSystem(spec_, weights_, At_, spatial_, starter_, target);
}

AllAtOnceSystem assemble_system(const ProblemSpec& spec, const StarterSolution& starter, Ordering ordering,
                                SpatialPtr spatial) {
  spec.validate();
  if (!spatial) spatial = make_spatial(spec.beta, spec.N, spec.dims, spec.kappa);
  if (spatial->size() != spec.spatial_size()) throw std::invalid_argument("assemble_system: spatial operator does not match the spec");
  if (starter.u1.size() != spatial->size()) throw std::invalid_argument("assemble_system: starter does not match the spec");
  L2Weights w(spec.alpha, spec.M);
  TimeBlockMatrix At = assemble_At(w, spec);
  return AllAtOnceSystem(spec, std::move(w), std::move(At), std::move(spatial), starter, ordering);
}

AllAtOnceSystem build_system(const ProblemSpec& spec, Ordering ordering, const StarterOptions& starter) {
  spec.validate();
  if (spec.M < 3) throw std::invalid_argument("the all-at-once system needs M >= 3");
  SpatialPtr spatial = make_spatial(spec.beta, spec.N, spec.dims, spec.kappa);
  StarterSolution st = solve_starter(spec, *spatial, starter);
  return assemble_system(spec, st, ordering, spatial);
}

void system_matvec(const AllAtOnceSystem& sys, std::span<const double> v, std::span<double> y) {
  const std::size_t T = sys.time_size();
  const std::size_t S = sys.space_size();
  check_len(T * S, v.size(), "system_matvec input");
  check_len(T * S, y.size(), "system_matvec output");
  std::vector<double> tmp(v.size());
  const auto at = [&sys](std::span<const double> a, std::span<double> b) { sys.At().apply(a, b); };
  if (sys.ordering() == Ordering::kSpaceMajor) {
    sys.spatial().apply(v, y, 1, T);
    apply_along_axis(v, tmp, S, T, 1, at);
  } else {
    sys.spatial().apply(v, y, T, 1);
    apply_along_axis(v, tmp, 1, T, S, at);
  }
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += tmp[i];
}

std::vector<double> system_matvec(const AllAtOnceSystem& sys, std::span<const double> v) {
  std::vector<double> y(v.size());
  system_matvec(sys, v, y);
  return y;
}

void system_matvec_transpose(const AllAtOnceSystem& sys, std::span<const double> v, std::span<double> y) {
  const std::size_t T = sys.time_size();
  const std::size_t S = sys.space_size();
  check_len(T * S, v.size(), "system_matvec_transpose input");
  check_len(T * S, y.size(), "system_matvec_transpose output");
  std::vector<double> tmp(v.size());
  const auto att = [&sys](std::span<const double> a, std::span<double> b) { sys.At().apply_transpose(a, b); };
  // S is symmetric.
  if (sys.ordering() == Ordering::kSpaceMajor) {
    sys.spatial().apply(v, y, 1, T);
    apply_along_axis(v, tmp, S, T, 1, att);
  } else {
    sys.spatial().apply(v, y, T, 1);
    apply_along_axis(v, tmp, 1, T, S, att);
  }
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += tmp[i];
}

std::vector<double> permute(std::span<const double> v, std::size_t T, std::size_t S, Ordering from, Ordering to) {
  check_len(T * S, v.size(), "permute");
  std::vector<double> out(v.begin(), v.end());
  if (from == to) return out;
  if (from == Ordering::kTimeMajor) {
    for (std::size_t j = 0; j < T; ++j)
      for (std::size_t p = 0; p < S; ++p) out[p * T + j] = v[j * S + p];
  } else {
    for (std::size_t j = 0; j < T; ++j)
      for (std::size_t p = 0; p < S; ++p) out[j * S + p] = v[p * T + j];
  }
  return out;
}

SolutionField extract_solution(const AllAtOnceSystem& sys, std::span<const double> x) {
  const std::size_t T = sys.time_size();
  const std::size_t S = sys.space_size();
  check_len(T * S, x.size(), "extract_solution");
  const ProblemSpec& spec = sys.spec();
  const Grid grid = build_grid(spec);
  const std::size_t n = static_cast<std::size_t>(spec.N) - 1;
  const std::vector<double> tm = permute(x, T, S, sys.ordering(), Ordering::kTimeMajor);
  SolutionField out;
  out.dims = spec.dims;
  out.nodes_x = grid.nodes_x;
  out.nodes_t = grid.nodes_t;
  out.values.reserve(T + 2);
  out.values.push_back(embed_interior(sys.starter().u0, n, spec.dims));
  out.values.push_back(embed_interior(sys.starter().u1, n, spec.dims));
  for (std::size_t j = 0; j < T; ++j)
    out.values.push_back(embed_interior(std::span<const double>(tm).subspan(j * S, S), n, spec.dims));
  return out;
}

std::vector<double> flatten_solution(const AllAtOnceSystem& sys, const SolutionField& field) {
  const std::size_t T = sys.time_size();
  const std::size_t S = sys.space_size();
  if (field.values.size() != T + 2) throw std::invalid_argument("flatten_solution: wrong number of time levels");
  const std::size_t n = static_cast<std::size_t>(sys.spec().N) - 1;
  std::vector<double> tm(T * S);
  for (std::size_t j = 0; j < T; ++j) {
    const std::vector<double> in = strip_boundary(field.values[j + 2], n, field.dims);
    std::copy(in.begin(), in.end(), tm.begin() + static_cast<std::ptrdiff_t>(j * S));
  }
  return permute(tm, T, S, Ordering::kTimeMajor, sys.ordering());
}

SolutionField exact_field(const ProblemSpec& spec) {
  if (!has_exact_solution(spec)) throw std::invalid_argument("exact_field: the problem has no exact solution");
  const Grid grid = build_grid(spec);
  SolutionField out;
  out.dims = spec.dims;
  out.nodes_x = grid.nodes_x;
  out.nodes_t = grid.nodes_t;
  const std::size_t side = grid.nodes_x.size();
  for (double t : grid.nodes_t) {
    std::vector<double> level;
    if (spec.dims == 1) {
      level.resize(side);
      for (std::size_t i = 0; i < side; ++i) level[i] = eval_exact(spec, grid.nodes_x[i], t);
    } else {
      level.resize(side * side);
      for (std::size_t i = 0; i < side; ++i)
        for (std::size_t k = 0; k < side; ++k) level[i * side + k] = eval_exact(spec, grid.nodes_x[i], grid.nodes_x[k], t);
    }
    out.values.push_back(std::move(level));
  }
  return out;
}

Eigen::MatrixXd dense_system(const AllAtOnceSystem& sys) {
  if (sys.size() > 20000) throw std::length_error("dense_system: system too large for dense assembly");
  const Eigen::MatrixXd A = sys.At().dense();
  const Eigen::MatrixXd S = sys.spatial().dense();
  const Eigen::MatrixXd It = Eigen::MatrixXd::Identity(A.rows(), A.rows());
  const Eigen::MatrixXd Is = Eigen::MatrixXd::Identity(S.rows(), S.rows());
  if (sys.ordering() == Ordering::kTimeMajor) return kron(A, Is) + kron(It, S);
  return kron(S, It) + kron(Is, A);
}

}  // namespace faao
