#pragma once

#include <optional>
#include <string>
#include <vector>

#include "faao/analysis.hpp"
#include "faao/assembly.hpp"
#include "faao/krylov.hpp"

namespace faao {

enum class SolverKind { kDense, kBicgstab, kPbicgstab };

std::string to_string(SolverKind kind);
SolverKind parse_solver_kind(const std::string& name);

/// Direct LU solve of the assembled system. Throws std::length_error when the
/// unknown count exceeds kDenseGuard.
SolveResult direct_dense_solve(const AllAtOnceSystem& sys);

/// Solves `sys` with the requested method. The preconditioned path reorders a
/// time-major system internally and returns x in the caller's layout.
SolveResult solve_system(const AllAtOnceSystem& sys, SolverKind kind, const SolverConfig& cfg = {});

struct SolveOutcome {
  SolutionField field;
  SolveReport report;
  std::optional<ErrorReport> errors;  // absent without an exact solution
  double starter_iterations = 0.0;    // mean inner iterations per starter step (Iter1)
  double total_time = 0.0;            // assembly + starter + solve, seconds
};

SolveOutcome solve_problem(const ProblemSpec& spec, SolverKind kind, const SolverConfig& cfg = {});

/// N = ceil(M^{(3-a)/2}) so that the spatial error tracks the temporal one.
int time_ladder_N(int M, double alpha);

struct LadderRow {
  int M = 0;
  int N = 0;
  ErrorReport errors;
  SolveReport report;
};

/// Time ladder: one row per M with N from time_ladder_N; orders use tau = T/M.
std::vector<LadderRow> time_ladder(const ProblemSpec& base, const std::vector<int>& Ms, SolverKind kind,
                                   const SolverConfig& cfg = {});

/// Space ladder at fixed base.M; orders use h.
std::vector<LadderRow> space_ladder(const ProblemSpec& base, const std::vector<int>& Ns, SolverKind kind,
                                    const SolverConfig& cfg = {});

}  // namespace faao
