#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace faao::cli {

/// Runs the `faao` command line. Returns the process exit code; usage errors are
/// nonzero and non-converged solves are reported with exit code 0.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Gnuplot script for a CSV written by `analysis --spectrum` ("spectrum") or
/// `convergence` ("errors").
std::string gnuplot_script(const std::string& kind, const std::string& csv_path, const std::string& image_path);

/// Thread cap: explicit flag if positive, else FAAO_THREADS, else 0 (runtime default).
int resolve_threads(int flag);

}  // namespace faao::cli
