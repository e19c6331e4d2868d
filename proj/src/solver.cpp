#include "faao/solver.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "faao/precond.hpp"

namespace faao {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

LinearOp system_op(const AllAtOnceSystem& sys) {
  return [&sys](std::span<const double> v, std::span<double> out) { system_matvec(sys, v, out); };
}

}  // namespace

std::string to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::kDense:
      return "dense";
    case SolverKind::kBicgstab:
      return "bicgstab";
    case SolverKind::kPbicgstab:
      return "pbicgstab";
  }
  return "unknown";
}

SolverKind parse_solver_kind(const std::string& name) {
  if (name == "dense") return SolverKind::kDense;
  if (name == "bicgstab") return SolverKind::kBicgstab;
  if (name == "pbicgstab") return SolverKind::kPbicgstab;
  throw std::invalid_argument("unknown solver: " + name);
}

SolveResult direct_dense_solve(const AllAtOnceSystem& sys) {
  const std::size_t n = sys.size();
  if (n > kDenseGuard)
    throw std::length_error("dense solve refused: " + std::to_string(n) + " unknowns exceed the guard of " +
                            std::to_string(kDenseGuard));
  const auto t0 = std::chrono::steady_clock::now();
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const RowMajor a = dense_system(sys);
  SolveResult out;
  out.x = dense_lu_solve(std::span<const double>(a.data(), n * n), n, sys.rhs());

  std::vector<double> r = system_matvec(sys, out.x);
  double rr = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    r[i] = sys.rhs()[i] - r[i];
    rr += r[i] * r[i];
    bb += sys.rhs()[i] * sys.rhs()[i];
  }
  out.report.method = "dense";
  out.report.converged = true;
  out.report.final_relres = bb > 0.0 ? std::sqrt(rr / bb) : std::sqrt(rr);
  out.report.explicit_relres = out.report.final_relres;
  out.report.wall_time = seconds_since(t0);
  return out;
}

SolveResult solve_system(const AllAtOnceSystem& sys, SolverKind kind, const SolverConfig& cfg) {
  switch (kind) {
    case SolverKind::kDense:
      return direct_dense_solve(sys);
    case SolverKind::kBicgstab: {
      SolveResult res = bicgstab(system_op(sys), sys.rhs(), cfg);
      res.report.method = "bicgstab";
      return res;
    }
    case SolverKind::kPbicgstab:
      break;
  }
  if (sys.ordering() != Ordering::kSpaceMajor) {
    const AllAtOnceSystem sm = sys.reordered(Ordering::kSpaceMajor);
    SolverConfig inner = cfg;
    if (!cfg.initial_guess.empty())
      inner.initial_guess = permute(cfg.initial_guess, sys.time_size(), sys.space_size(), sys.ordering(), Ordering::kSpaceMajor);
    SolveResult res = solve_system(sm, kind, inner);
    res.x = permute(res.x, sys.time_size(), sys.space_size(), Ordering::kSpaceMajor, sys.ordering());
    return res;
  }
  const BilateralPreconditioner P(sys);
  const Bilateral pc{[&P](auto v, auto o) { P.apply_Pl_inv(v, o); }, [&P](auto v, auto o) { P.apply_Pr_inv(v, o); },
                     [&P](auto v, auto o) { P.apply_Pr(v, o); }};
  SolveResult res = bicgstab(system_op(sys), sys.rhs(), cfg, &pc);
  res.report.method = "pbicgstab";
  return res;
}

SolveOutcome solve_problem(const ProblemSpec& spec, SolverKind kind, const SolverConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const Ordering ordering = kind == SolverKind::kPbicgstab ? Ordering::kSpaceMajor : Ordering::kTimeMajor;
  const AllAtOnceSystem sys = build_system(spec, ordering);
  SolveResult res = solve_system(sys, kind, cfg);
  SolveOutcome out;
  out.field = extract_solution(sys, res.x);
  out.report = std::move(res.report);
  out.starter_iterations = sys.starter().mean_iterations();
  if (has_exact_solution(spec)) out.errors = compute_errors(out.field, spec);
  out.total_time = seconds_since(t0);
  return out;
}

int time_ladder_N(int M, double alpha) {
  return static_cast<int>(std::ceil(std::pow(static_cast<double>(M), (3.0 - alpha) / 2.0) - 1e-9));
}

std::vector<LadderRow> time_ladder(const ProblemSpec& base, const std::vector<int>& Ms, SolverKind kind,
                                   const SolverConfig& cfg) {
  std::vector<LadderRow> rows;
  std::vector<ErrorReport> reports;
  std::vector<double> steps;
  for (int M : Ms) {
    ProblemSpec spec = base;
    spec.M = M;
    spec.N = time_ladder_N(M, spec.alpha);
    SolveOutcome out = solve_problem(spec, kind, cfg);
    if (!out.errors) throw std::invalid_argument("convergence ladder needs a problem with an exact solution");
    rows.push_back({spec.M, spec.N, *out.errors, out.report});
    reports.push_back(*out.errors);
    steps.push_back(spec.tau());
  }
  fill_orders(reports, steps);
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].errors = reports[i];
  return rows;
}

std::vector<LadderRow> space_ladder(const ProblemSpec& base, const std::vector<int>& Ns, SolverKind kind,
                                    const SolverConfig& cfg) {
  std::vector<LadderRow> rows;
  std::vector<ErrorReport> reports;
  std::vector<double> steps;
  for (int N : Ns) {
    ProblemSpec spec = base;
    spec.N = N;
    SolveOutcome out = solve_problem(spec, kind, cfg);
    if (!out.errors) throw std::invalid_argument("convergence ladder needs a problem with an exact solution");
    rows.push_back({spec.M, spec.N, *out.errors, out.report});
    reports.push_back(*out.errors);
    steps.push_back(spec.h());
  }
  fill_orders(reports, steps);
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].errors = reports[i];
  return rows;
}

}  // namespace faao
