#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "faao/config.hpp"
#include "faao/spatial.hpp"
#include "faao/toeplitz.hpp"
#include "faao/weights.hpp"

namespace faao {

/// Lower-triangular time matrix A_t of order M-1:
///   A_t = [a11 0; a12 A22],  scale = h^b tau^{-a} / Gamma(2-a),
///   a11 = scale ct_0,  a12_k = scale (ct_k - c_{k-1}),  A22 = scale T(c_0, c_1-c_0, ...).
class TimeBlockMatrix {
 public:
  TimeBlockMatrix(double scale, double a11, std::vector<double> a12, LowerTriToeplitzOp a22);

  std::size_t order() const { return a12_.size() + 1; }
  double scale() const { return scale_; }
  double a11() const { return a11_; }
  const std::vector<double>& a12() const { return a12_; }
  const LowerTriToeplitzOp& a22() const { return a22_; }

  void apply(std::span<const double> x, std::span<double> y) const;
  void apply_transpose(std::span<const double> x, std::span<double> y) const;
  Eigen::MatrixXd dense() const;

 private:
  double scale_;
  double a11_;
  std::vector<double> a12_;
  LowerTriToeplitzOp a22_;
};

TimeBlockMatrix assemble_At(const L2Weights& weights, const ProblemSpec& spec);

enum class Ordering { kTimeMajor, kSpaceMajor };

std::string to_string(Ordering o);

/// Inner solver used by each fast-L1 starter step.
enum class StarterSolver { kPcgTau, kCg, kGsf };

struct StarterOptions {
  StarterSolver solver = StarterSolver::kPcgTau;
  double tol = 1e-9;
  int max_iter = 1000;
  // SOE tolerance relative to the kernel's largest value tau_hat^{-alpha}.
  double soe_rel_eps = 1e-12;
};

struct StarterSolution {
  std::vector<double> u0;  // interior values at t_0
  std::vector<double> u1;  // interior values at t_1
  std::vector<int> iterations;
  bool converged = true;
  double tau_hat = 0.0;
  int M_hat = 0;
  std::size_t soe_terms = 0;

  double mean_iterations() const;
};

/// tau_hat = tau^{(3-a)/(2-a)} readjusted to t_1 / floor(t_1 / tau_hat).
double starter_step(const ProblemSpec& spec, int* steps = nullptr);

/// Fast-L1 starter: M_hat steps on [0, t_1], each solving
///   (h^b b_j / Gamma(1-a) I + S) u^j = h^b f^j + h^b / Gamma(1-a) (b_j u^{j-1} - history),
/// with the history sum carried by the SOE recurrence.
StarterSolution solve_starter(const ProblemSpec& spec, const SpatialOperator& spatial, const StarterOptions& options = {});

/// Interior values of the initial condition.
std::vector<double> initial_interior(const ProblemSpec& spec);

/// Source samples f(x_p, t_j) at interior nodes for one time level.
std::vector<double> source_interior(const ProblemSpec& spec, double t);

class AllAtOnceSystem {
 public:
  AllAtOnceSystem(ProblemSpec spec, L2Weights weights, TimeBlockMatrix At, SpatialPtr spatial, StarterSolution starter,
                  Ordering ordering);

  const ProblemSpec& spec() const { return spec_; }
  const L2Weights& weights() const { return weights_; }
  const TimeBlockMatrix& At() const { return At_; }
  const SpatialOperator& spatial() const { return *spatial_; }
  SpatialPtr spatial_ptr() const { return spatial_; }
  const StarterSolution& starter() const { return starter_; }
  Ordering ordering() const { return ordering_; }

  std::size_t time_size() const { return At_.order(); }
  std::size_t space_size() const { return spatial_->size(); }
  std::size_t size() const { return time_size() * space_size(); }

  const std::vector<double>& eta() const { return eta_; }
  const std::vector<double>& rhs() const { return rhs_; }

  // Same system in the other layout.
  AllAtOnceSystem reordered(Ordering target) const;

 private:
  ProblemSpec spec_;
  L2Weights weights_;
  TimeBlockMatrix At_;
  SpatialPtr spatial_;
  StarterSolution starter_;
  Ordering ordering_;
  std::vector<double> eta_;
  std::vector<double> rhs_;
};

AllAtOnceSystem assemble_system(const ProblemSpec& spec, const StarterSolution& starter, Ordering ordering,
                                SpatialPtr spatial = nullptr);

/// Builds spatial operator, starter and system in one go.
AllAtOnceSystem build_system(const ProblemSpec& spec, Ordering ordering, const StarterOptions& starter = {});

/// y = M v (time-major, A_t (x) I + I (x) S) or y = M~ v (space-major, S (x) I + I (x) A_t).
void system_matvec(const AllAtOnceSystem& sys, std::span<const double> v, std::span<double> y);
std::vector<double> system_matvec(const AllAtOnceSystem& sys, std::span<const double> v);

/// Transpose product, used by the iterative condition number estimate.
void system_matvec_transpose(const AllAtOnceSystem& sys, std::span<const double> v, std::span<double> y);

/// Reorders between layouts; `time_blocks` = M-1, `space_points` = interior nodes per level.
std::vector<double> permute(std::span<const double> v, std::size_t time_blocks, std::size_t space_points, Ordering from,
                            Ordering to);

/// Solution on all grid nodes including boundaries: values[j] holds level t_j on (N+1)^dims
/// nodes, x-index outer in 2D.
struct SolutionField {
  int dims = 1;
  std::vector<double> nodes_x;
  std::vector<double> nodes_t;
  std::vector<std::vector<double>> values;
};

SolutionField extract_solution(const AllAtOnceSystem& sys, std::span<const double> x);

/// Interior unknowns of `field` at t_2..t_M in the system's layout (inverse of extract_solution).
std::vector<double> flatten_solution(const AllAtOnceSystem& sys, const SolutionField& field);

/// Exact solution sampled on the grid, same shape as extract_solution.
SolutionField exact_field(const ProblemSpec& spec);

/// Dense system matrix in the system's ordering (small sizes only).
Eigen::MatrixXd dense_system(const AllAtOnceSystem& sys);

}  // namespace faao
