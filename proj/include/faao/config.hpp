#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace faao {

/// Manufactured problems with closed-form source, initial value and exact solution.
///   kExample1: 1D on [0,1], u = (t^{3+a} + t^2 + 1) x^2 (1-x)^2
///   kExample2: 1D on [-1,1], u = (t^{3+a} + 1) (1+x)^2 (1-x)^2
///   kExample3: 2D on [0,1]^2, u = 200 (t^{2+a+b} + 1) x^2 (1-x)^2 y^2 (1-y)^2
///   kCustom:   caller-supplied source and initial value, no exact solution.
enum class ExampleId { kExample1 = 1, kExample2 = 2, kExample3 = 3, kCustom = 0 };

using SourceFn = std::function<double(double x, double y, double t)>;
using InitialFn = std::function<double(double x, double y)>;

struct ProblemSpec {
  double alpha = 0.5;
  double beta = 1.5;
  double kappa = 1.0;
  double x_left = 0.0;
  double x_right = 1.0;
  double t_final = 1.0;
  int M = 10;  // time intervals
  int N = 10;  // space intervals per direction
  int dims = 1;
  ExampleId example_id = ExampleId::kExample1;

  // Only consulted when example_id == kCustom. The y argument is ignored in 1D.
  SourceFn custom_source;
  InitialFn custom_initial;

  double h() const { return (x_right - x_left) / N; }
  double tau() const { return t_final / M; }

  // Number of interior spatial unknowns per time level, (N-1)^dims.
  std::size_t spatial_size() const;

  // Throws std::invalid_argument on any violated invariant.
  void validate() const;

  // Preset domain/final time for one of the manufactured examples.
  static ProblemSpec for_example(ExampleId id, double alpha, double beta, int M, int N);
};

struct Grid {
  std::vector<double> nodes_x;  // N+1 entries, also used for y in 2D
  std::vector<double> nodes_t;  // M+1 entries
  double h = 0.0;
  double tau_t = 0.0;
};

Grid build_grid(const ProblemSpec& spec);

double eval_source(const ProblemSpec& spec, double x, double t);
double eval_source(const ProblemSpec& spec, double x, double y, double t);
double eval_exact(const ProblemSpec& spec, double x, double t);
double eval_exact(const ProblemSpec& spec, double x, double y, double t);
double eval_initial(const ProblemSpec& spec, double x, double y = 0.0);

bool has_exact_solution(const ProblemSpec& spec);

/// Piecewise-linear-in-time source built from values tabulated on the grid.
/// `values[j]` holds f at t_j on all (N+1)^dims nodes (row-major x-then-y).
SourceFn tabulated_source(const Grid& grid, int dims, std::vector<std::vector<double>> values);

ExampleId parse_example_id(int id);

}  // namespace faao
