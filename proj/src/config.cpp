#include "faao/config.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace faao {

namespace {

// x^2 (1-x)^2 on [0,1]
double bump01(double x) { return x * x * (1.0 - x) * (1.0 - x); }

// Riesz derivative bracket of x^2 (1-x)^2 (extended by zero) up to the
// -1/(2 cos(pi beta/2)) prefactor.
double bracket01(double x, double beta) {
  const double l = 1.0 - x;
  return std::tgamma(3.0) / std::tgamma(3.0 - beta) * (std::pow(x, 2.0 - beta) + std::pow(l, 2.0 - beta)) -
         2.0 * std::tgamma(4.0) / std::tgamma(4.0 - beta) * (std::pow(x, 3.0 - beta) + std::pow(l, 3.0 - beta)) +
         std::tgamma(5.0) / std::tgamma(5.0 - beta) * (std::pow(x, 4.0 - beta) + std::pow(l, 4.0 - beta));
}

// Same bracket for (1+x)^2 (1-x)^2 on [-1,1].
double bracket11(double x, double beta) {
  const double p = 1.0 + x;
  const double m = 1.0 - x;
  return 4.0 * std::tgamma(3.0) / std::tgamma(3.0 - beta) * (std::pow(p, 2.0 - beta) + std::pow(m, 2.0 - beta)) -
         4.0 * std::tgamma(4.0) / std::tgamma(4.0 - beta) * (std::pow(p, 3.0 - beta) + std::pow(m, 3.0 - beta)) +
         std::tgamma(5.0) / std::tgamma(5.0 - beta) * (std::pow(p, 4.0 - beta) + std::pow(m, 4.0 - beta));
}

double cos_beta(double beta) { return std::cos(std::numbers::pi * beta / 2.0); }

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

void require_dims(const ProblemSpec& spec, int dims) {
  if (spec.dims != dims) {
    throw std::invalid_argument("example " + std::to_string(static_cast<int>(spec.example_id)) + " is " +
                                std::to_string(dims) + "D but spec.dims=" + std::to_string(spec.dims));
  }
}

}  // namespace

std::size_t ProblemSpec::spatial_size() const {
  const auto side = static_cast<std::size_t>(N - 1);
  return dims == 2 ? side * side : side;
}

void ProblemSpec::validate() const {
  require(alpha > 0.0 && alpha < 1.0, "alpha must lie in the open interval (0,1)");
  require(beta > 1.0 && beta < 2.0, "beta must lie in the open interval (1,2)");
  require(kappa > 0.0 && std::isfinite(kappa), "kappa must be positive");
  require(x_left < x_right, "x_left must be smaller than x_right");
  require(t_final > 0.0 && std::isfinite(t_final), "t_final must be positive");
  require(M >= 1, "M must be a positive integer");
  require(N >= 1, "N must be a positive integer");
  require(dims == 1 || dims == 2, "dims must be 1 or 2");
  if (example_id == ExampleId::kCustom) {
    require(static_cast<bool>(custom_source), "custom problem requires a source function");
  }
}

ProblemSpec ProblemSpec::for_example(ExampleId id, double alpha, double beta, int M, int N) {
  ProblemSpec spec;
  spec.alpha = alpha;
  spec.beta = beta;
  spec.M = M;
  spec.N = N;
  spec.kappa = 1.0;
  spec.t_final = 1.0;
  spec.example_id = id;
  switch (id) {
    case ExampleId::kExample1:
      spec.x_left = 0.0;
      spec.x_right = 1.0;
      spec.dims = 1;
      break;
    case ExampleId::kExample2:
      spec.x_left = -1.0;
      spec.x_right = 1.0;
      spec.dims = 1;
      break;
    case ExampleId::kExample3:
      spec.x_left = 0.0;
      spec.x_right = 1.0;
      spec.dims = 2;
      break;
    case ExampleId::kCustom:
      break;
  }
  return spec;
}

Grid build_grid(const ProblemSpec& spec) {
  spec.validate();
  Grid grid;
  grid.h = spec.h();
  grid.tau_t = spec.tau();
  grid.nodes_x.resize(static_cast<std::size_t>(spec.N) + 1);
  for (int i = 0; i <= spec.N; ++i) grid.nodes_x[i] = spec.x_left + i * grid.h;
  grid.nodes_x.back() = spec.x_right;
  grid.nodes_t.resize(static_cast<std::size_t>(spec.M) + 1);
  for (int j = 0; j <= spec.M; ++j) grid.nodes_t[j] = j * grid.tau_t;
  grid.nodes_t.back() = spec.t_final;
  return grid;
}

double eval_source(const ProblemSpec& spec, double x, double t) {
  require_dims(spec, 1);
  return eval_source(spec, x, 0.0, t);
}

double eval_source(const ProblemSpec& spec, double x, double y, double t) {
  const double a = spec.alpha;
  const double b = spec.beta;
  const double k = spec.kappa;
  switch (spec.example_id) {
    case ExampleId::kExample1: {
      require_dims(spec, 1);
      const double time_part =
          (std::tgamma(4.0 + a) / std::tgamma(4.0) * t * t * t + std::tgamma(3.0) / std::tgamma(3.0 - a) * std::pow(t, 2.0 - a)) *
          bump01(x);
      return time_part + k * (std::pow(t, 3.0 + a) + t * t + 1.0) / (2.0 * cos_beta(b)) * bracket01(x, b);
    }
    case ExampleId::kExample2: {
      require_dims(spec, 1);
      const double w = (1.0 + x) * (1.0 + x) * (1.0 - x) * (1.0 - x);
      return std::tgamma(4.0 + a) / std::tgamma(4.0) * t * t * t * w +
             k * (std::pow(t, 3.0 + a) + 1.0) / (2.0 * cos_beta(b)) * bracket11(x, b);
    }
    case ExampleId::kExample3: {
      require_dims(spec, 2);
      const double bx = bump01(x);
      const double by = bump01(y);
      const double lead = 200.0 * std::tgamma(3.0 + a + b) / std::tgamma(3.0 + b) * std::pow(t, 2.0 + b) * bx * by;
      const double amp = 50.0 * k * (std::pow(t, 2.0 + a + b) + 1.0) / cos_beta(b);
      return lead + amp * (bracket01(x, b) * by + bracket01(y, b) * bx);
    }
    case ExampleId::kCustom:
      if (!spec.custom_source) throw std::invalid_argument("custom problem has no source function");
      return spec.custom_source(x, y, t);
  }
  throw std::invalid_argument("unknown example_id");
}

double eval_exact(const ProblemSpec& spec, double x, double t) {
  require_dims(spec, 1);
  return eval_exact(spec, x, 0.0, t);
}

double eval_exact(const ProblemSpec& spec, double x, double y, double t) {
  const double a = spec.alpha;
  switch (spec.example_id) {
    case ExampleId::kExample1:
      require_dims(spec, 1);
      return (std::pow(t, 3.0 + a) + t * t + 1.0) * bump01(x);
    case ExampleId::kExample2:
      require_dims(spec, 1);
      return (std::pow(t, 3.0 + a) + 1.0) * (1.0 + x) * (1.0 + x) * (1.0 - x) * (1.0 - x);
    case ExampleId::kExample3:
      require_dims(spec, 2);
      return 200.0 * (std::pow(t, 2.0 + a + spec.beta) + 1.0) * bump01(x) * bump01(y);
    case ExampleId::kCustom:
      throw std::invalid_argument("custom problem has no exact solution");
  }
  throw std::invalid_argument("unknown example_id");
}

double eval_initial(const ProblemSpec& spec, double x, double y) {
  if (spec.example_id == ExampleId::kCustom) {
    return spec.custom_initial ? spec.custom_initial(x, y) : 0.0;
  }
  return eval_exact(spec, x, y, 0.0);
}

bool has_exact_solution(const ProblemSpec& spec) { return spec.example_id != ExampleId::kCustom; }

SourceFn tabulated_source(const Grid& grid, int dims, std::vector<std::vector<double>> values) {
  const std::size_t side = grid.nodes_x.size();
  const std::size_t per_level = dims == 2 ? side * side : side;
  if (values.size() != grid.nodes_t.size()) {
    throw std::invalid_argument("tabulated source needs one table per time node");
  }
  for (const auto& level : values) {
    if (level.size() != per_level) throw std::invalid_argument("tabulated source level has wrong size");
  }
  const double x0 = grid.nodes_x.front();
  const double h = grid.h;
  const double tau = grid.tau_t;
  const std::size_t levels = values.size();
  auto node = [=](double x) {
    const double r = (x - x0) / h;
    const double k = std::round(r);
    if (std::abs(r - k) > 1e-8 || k < 0 || k >= static_cast<double>(side)) {
      throw std::invalid_argument("tabulated source evaluated off the spatial grid");
    }
    return static_cast<std::size_t>(k);
  };
  return [=, table = std::move(values)](double x, double y, double t) {
    const std::size_t ix = node(x);
    const std::size_t idx = dims == 2 ? ix * side + node(y) : ix;
    double s = t / tau;
    if (s <= 0.0) return table.front()[idx];
    if (s >= static_cast<double>(levels - 1)) return table.back()[idx];
    const auto j = static_cast<std::size_t>(std::floor(s));
    const double w = s - static_cast<double>(j);
    return (1.0 - w) * table[j][idx] + w * table[j + 1][idx];
  };
}

ExampleId parse_example_id(int id) {
  switch (id) {
    case 0:
      return ExampleId::kCustom;
    case 1:
      return ExampleId::kExample1;
    case 2:
      return ExampleId::kExample2;
    case 3:
      return ExampleId::kExample3;
    default:
      throw std::invalid_argument("unknown example_id " + std::to_string(id));
  }
}

}  // namespace faao
