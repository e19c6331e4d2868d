#pragma once

#include <map>
#include <string>
#include <vector>

#include "faao/analysis.hpp"
#include "faao/assembly.hpp"
#include "faao/config.hpp"

namespace faao::io {

/// Parses a ProblemSpec from a JSON object whose keys match the field names
/// (alpha, beta, kappa, x_left, x_right, t_final, M, N, dims, example_id).
/// Missing keys keep their defaults; unknown keys are rejected.
ProblemSpec problem_from_json(const std::string& text);
ProblemSpec load_problem(const std::string& path);
std::string problem_to_json(const ProblemSpec& spec);

/// Rectangular table of strings with a header row.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;
};

/// `comments` become leading "# " lines; read_csv skips them.
void write_csv(const std::string& path, const CsvTable& table, const std::vector<std::string>& comments = {});
CsvTable read_csv(const std::string& path);

/// Shortest representation that round-trips the double.
std::string format_double(double v);

/// Long-format solution table: columns x[, y], t, value.
CsvTable solution_table(const SolutionField& field);

/// Row-major doubles plus `<path>.json` describing {"shape": [...], "dtype": "float64", ...}.
void write_binary(const std::string& path, const std::vector<double>& data, const std::vector<std::size_t>& shape,
                  const std::string& manifest);
std::vector<double> read_binary(const std::string& path, std::vector<std::size_t>* shape = nullptr);

/// Writes the solution field as a (levels, nodes) binary dump.
void write_solution_binary(const std::string& path, const SolutionField& field, const std::string& manifest);

CsvTable errors_table(const std::vector<int>& M, const std::vector<int>& N, const std::vector<ErrorReport>& reports);

std::string to_json(const ErrorReport& report);

/// Run description written next to every command's outputs.
struct RunManifest {
  std::string command;
  std::map<std::string, std::string> parameters;
  bool seed_irrelevant = true;
  std::string timestamp;
  std::string version;
  std::vector<std::string> outputs;
};

std::string to_json(const RunManifest& manifest);
RunManifest manifest_from_json(const std::string& text);
std::string utc_timestamp();

}  // namespace faao::io
