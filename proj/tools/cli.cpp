#include "cli.hpp"

#include <omp.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "faao/analysis.hpp"
#include "faao/io.hpp"
#include "faao/solver.hpp"
#include "json.hpp"

namespace faao::cli {

namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

constexpr const char* kManifestName = "manifest.json";

struct ProblemFlags {
  double alpha = std::numeric_limits<double>::quiet_NaN();
  double beta = std::numeric_limits<double>::quiet_NaN();
  double kappa = 1.0;
  int M = 16;
  int N = 16;
  int example = 0;  // 0: pick from dims
  int dims = 0;     // 0: pick from example
};

struct OutputFlags {
  std::string dir = "faao_out";
  std::string format = "csv";
  int threads = 0;
};

struct SolverFlags {
  std::string solver = "pbicgstab";
  double tol = 1e-9;
  int max_iter = 1000;
};

void add_problem_flags(CLI::App* app, ProblemFlags& f) {
  app->add_option("--alpha", f.alpha, "time-fractional order in (0,1)")->required();
  app->add_option("--beta", f.beta, "space-fractional order in (1,2)")->required();
  app->add_option("--kappa", f.kappa, "diffusion coefficient")->check(CLI::PositiveNumber);
  app->add_option("--example", f.example, "manufactured example (1, 2: 1D; 3: 2D)")->check(CLI::IsMember({1, 2, 3}));
  app->add_option("--dims", f.dims, "spatial dimension")->check(CLI::IsMember({1, 2}));
}

void add_grid_flags(CLI::App* app, ProblemFlags& f) {
  app->add_option("--M", f.M, "time intervals")->check(CLI::Range(3, 1 << 20));
  app->add_option("--N", f.N, "space intervals per direction")->check(CLI::Range(3, 1 << 20));
}

void add_output_flags(CLI::App* app, OutputFlags& f) {
  app->add_option("--out", f.dir, "output directory");
  app->add_option("--format", f.format, "output format")->check(CLI::IsMember({"csv", "json"}));
  app->add_option("--threads", f.threads, "thread cap (falls back to FAAO_THREADS)")->check(CLI::NonNegativeNumber);
}

void add_solver_flags(CLI::App* app, SolverFlags& f) {
  app->add_option("--solver", f.solver, "linear solver")->check(CLI::IsMember({"dense", "bicgstab", "pbicgstab"}));
  app->add_option("--tol", f.tol, "relative residual tolerance")->check(CLI::PositiveNumber);
  app->add_option("--max-iter", f.max_iter, "iteration cap")->check(CLI::PositiveNumber);
}

ProblemSpec make_spec(const ProblemFlags& f) {
  int example = f.example;
  if (example == 0) example = f.dims == 2 ? 3 : 1;
  const int natural_dims = example == 3 ? 2 : 1;
  if (f.dims != 0 && f.dims != natural_dims)
    throw std::invalid_argument("example " + std::to_string(example) + " is " + std::to_string(natural_dims) + "D");
  ProblemSpec spec = ProblemSpec::for_example(parse_example_id(example), f.alpha, f.beta, f.M, f.N);
  spec.kappa = f.kappa;
  spec.validate();
  return spec;
}

std::map<std::string, std::string> spec_parameters(const ProblemSpec& spec) {
  return {{"alpha", io::format_double(spec.alpha)},
          {"beta", io::format_double(spec.beta)},
          {"kappa", io::format_double(spec.kappa)},
          {"M", std::to_string(spec.M)},
          {"N", std::to_string(spec.N)},
          {"dims", std::to_string(spec.dims)},
          {"example", std::to_string(static_cast<int>(spec.example_id))},
          {"x_left", io::format_double(spec.x_left)},
          {"x_right", io::format_double(spec.x_right)},
          {"t_final", io::format_double(spec.t_final)}};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << text << '\n';
}

void write_manifest(const fs::path& dir, const std::string& command, std::map<std::string, std::string> params,
                    std::vector<std::string> outputs) {
  io::RunManifest m;
  m.command = command;
  m.parameters = std::move(params);
  m.seed_irrelevant = true;
  m.timestamp = io::utc_timestamp();
  m.version = FAAO_VERSION;
  m.outputs = std::move(outputs);
  write_text(dir / kManifestName, io::to_json(m));
}

std::vector<std::string> manifest_comment() { return {std::string("manifest: ") + kManifestName}; }

// Wraps a JSON payload so that the file names its manifest.
std::string with_manifest(const std::string& key, const ojson& payload) {
  ojson j;
  j["manifest"] = kManifestName;
  j[key] = payload;
  return j.dump(2);
}

void apply_threads(int flag) {
  const int threads = resolve_threads(flag);
  if (threads > 0) omp_set_num_threads(threads);
}

fs::path prepare_dir(const std::string& dir) {
  const fs::path p(dir);
  fs::create_directories(p);
  return p;
}

io::CsvTable report_table(const SolveReport& r) {
  io::CsvTable t;
  t.header = {"method", "iterations", "converged", "final_relres", "explicit_relres", "wall_time", "flagged_dag",
              "breakdown"};
  t.rows.push_back({r.method, std::to_string(r.iterations), r.converged ? "true" : "false",
                    io::format_double(r.final_relres), io::format_double(r.explicit_relres),
                    io::format_double(r.wall_time), r.flagged_dag ? "true" : "false", r.breakdown});
  return t;
}

std::string pair_label(const ProblemSpec& spec) {
  std::ostringstream s;
  s << '(' << spec.alpha << ", " << spec.beta << ')';
  return s.str();
}

int cmd_solve(const ProblemFlags& pf, const SolverFlags& sf, const OutputFlags& of, std::ostream& out) {
  apply_threads(of.threads);
  const ProblemSpec spec = make_spec(pf);
  SolverConfig cfg;
  cfg.tol = sf.tol;
  cfg.max_iter = sf.max_iter;
  const SolverKind kind = parse_solver_kind(sf.solver);
  const SolveOutcome res = solve_problem(spec, kind, cfg);

  const fs::path dir = prepare_dir(of.dir);
  std::vector<std::string> outputs;
  if (of.format == "csv") {
    io::write_csv(dir / "solution.csv", io::solution_table(res.field), manifest_comment());
    io::write_csv(dir / "report.csv", report_table(res.report), manifest_comment());
    outputs = {"solution.csv", "report.csv"};
    if (res.errors) {
      io::write_csv(dir / "errors.csv", io::errors_table({spec.M}, {spec.N}, {*res.errors}), manifest_comment());
      outputs.push_back("errors.csv");
    }
  } else {
    io::write_solution_binary(dir / "solution.bin", res.field, kManifestName);
    write_text(dir / "report.json", with_manifest("report", ojson::parse(to_json(res.report))));
    outputs = {"solution.bin", "solution.bin.json", "report.json"};
    if (res.errors) {
      write_text(dir / "errors.json", with_manifest("errors", ojson::parse(io::to_json(*res.errors))));
      outputs.push_back("errors.json");
    }
  }
  auto params = spec_parameters(spec);
  params["solver"] = sf.solver;
  params["tol"] = io::format_double(sf.tol);
  params["max_iter"] = std::to_string(sf.max_iter);
  params["format"] = of.format;
  write_manifest(dir, "solve", std::move(params), std::move(outputs));

  out << pair_label(spec) << "  M=" << spec.M << " N=" << spec.N << "  " << sf.solver << "  (Iter1, Iter2) = ";
  out << std::fixed << std::setprecision(1) << '(' << res.starter_iterations << ", ";
  if (kind == SolverKind::kDense)
    out << "direct";
  else if (res.report.flagged_dag)
    out << "dag";
  else
    out << res.report.iterations;
  out << ")  Time = " << std::setprecision(3) << res.total_time << " s\n";
  out.unsetf(std::ios::floatfield);
  if (res.errors) out << std::setprecision(5) << "Err_inf = " << res.errors->err_inf << "  Err_2 = " << res.errors->err_2 << '\n';
  return 0;
}

struct LadderFlags {
  std::string ladder = "time";
  std::vector<int> Ms{10, 20, 40, 80, 160};
  std::vector<int> Ns{10, 20, 40, 80, 160};
  int M = 1024;
};

int cmd_convergence(ProblemFlags pf, const LadderFlags& lf, const SolverFlags& sf, const OutputFlags& of,
                    std::ostream& out) {
  apply_threads(of.threads);
  pf.M = lf.M;
  const ProblemSpec base = make_spec(pf);
  SolverConfig cfg;
  cfg.tol = sf.tol;
  cfg.max_iter = sf.max_iter;
  const SolverKind kind = parse_solver_kind(sf.solver);
  const std::vector<LadderRow> rows =
      lf.ladder == "time" ? time_ladder(base, lf.Ms, kind, cfg) : space_ladder(base, lf.Ns, kind, cfg);

  std::vector<int> Ms, Ns;
  std::vector<ErrorReport> reports;
  for (const auto& r : rows) {
    Ms.push_back(r.M);
    Ns.push_back(r.N);
    reports.push_back(r.errors);
  }
  const fs::path dir = prepare_dir(of.dir);
  std::string file;
  if (of.format == "csv") {
    file = "convergence.csv";
    io::write_csv(dir / file, io::errors_table(Ms, Ns, reports), manifest_comment());
  } else {
    file = "convergence.json";
    ojson arr = ojson::array();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      ojson row;
      row["M"] = Ms[i];
      row["N"] = Ns[i];
      for (const auto& [k, v] : ojson::parse(io::to_json(reports[i])).items()) row[k] = v;
      arr.push_back(row);
    }
    write_text(dir / file, with_manifest("rows", arr));
  }
  auto params = spec_parameters(base);
  params.erase(lf.ladder == "time" ? "M" : "N");
  if (lf.ladder == "time") params.erase("N");
  params["ladder"] = lf.ladder;
  std::ostringstream steps;
  for (int v : lf.ladder == "time" ? lf.Ms : lf.Ns) steps << (steps.tellp() > 0 ? "," : "") << v;
  params[lf.ladder == "time" ? "Ms" : "Ns"] = steps.str();
  params["solver"] = sf.solver;
  params["tol"] = io::format_double(sf.tol);
  params["format"] = of.format;
  write_manifest(dir, "convergence", std::move(params), {file});

  out << pair_label(base) << "  " << lf.ladder << " ladder\n";
  out << std::setw(6) << "M" << std::setw(6) << "N" << std::setw(14) << "Err_inf" << std::setw(10) << "CO_inf"
      << std::setw(14) << "Err_2" << std::setw(10) << "CO_2" << '\n';
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& e = reports[i];
    out << std::setw(6) << Ms[i] << std::setw(6) << Ns[i] << std::scientific << std::setprecision(4) << std::setw(14)
        << e.err_inf << std::fixed << std::setw(10);
    if (e.order_inf) out << *e.order_inf; else out << "--";
    out << std::scientific << std::setw(14) << e.err_2 << std::fixed << std::setw(10);
    if (e.order_2) out << *e.order_2; else out << "--";
    out << '\n';
  }
  out.unsetf(std::ios::floatfield);
  return 0;
}

struct AnalysisFlags {
  std::vector<std::string> matrices{"M", "PlinvMPrinv"};
  std::string method = "dense";
  bool spectrum = false;
};

int cmd_analysis(const ProblemFlags& pf, const AnalysisFlags& af, const OutputFlags& of, std::ostream& out) {
  apply_threads(of.threads);
  const ProblemSpec spec = make_spec(pf);
  std::vector<MatrixTag> tags;
  for (const auto& m : af.matrices) tags.push_back(parse_matrix_tag(m));
  const AllAtOnceSystem sys = build_system(spec, Ordering::kSpaceMajor);
  const CondMethod method = af.method == "dense" ? CondMethod::kDense : CondMethod::kIterative;

  const fs::path dir = prepare_dir(of.dir);
  std::vector<std::string> outputs;
  io::CsvTable cond;
  cond.header = {"matrix", "kappa2"};
  out << pair_label(spec) << "  M=" << spec.M << " N=" << spec.N << '\n';
  for (MatrixTag tag : tags) {
    const SpectrumReport rep = condition_number(tag, sys, method);
    cond.rows.push_back({to_string(tag), io::format_double(rep.kappa2)});
    out << "  kappa2(" << to_string(tag) << ") = " << std::fixed << std::setprecision(4) << rep.kappa2 << '\n';
    out.unsetf(std::ios::floatfield);
    if (af.spectrum) {
      const SpectrumReport sp = spectrum_dump(tag, sys);
      io::CsvTable t;
      t.header = {"re", "im"};
      for (const auto& z : sp.eigenvalues) t.rows.push_back({io::format_double(z.real()), io::format_double(z.imag())});
      const std::string name = "spectrum_" + to_string(tag) + ".csv";
      io::write_csv(dir / name, t, manifest_comment());
      outputs.push_back(name);
    }
  }
  if (of.format == "csv") {
    io::write_csv(dir / "condition.csv", cond, manifest_comment());
    outputs.insert(outputs.begin(), "condition.csv");
  } else {
    ojson arr = ojson::array();
    for (const auto& row : cond.rows) arr.push_back({{"matrix", row[0]}, {"kappa2", std::stod(row[1])}});
    write_text(dir / "condition.json", with_manifest("condition", arr));
    outputs.insert(outputs.begin(), "condition.json");
  }
  auto params = spec_parameters(spec);
  std::string joined;
  for (const auto& m : af.matrices) joined += (joined.empty() ? "" : ",") + m;
  params["matrices"] = joined;
  params["method"] = af.method;
  params["format"] = of.format;
  write_manifest(dir, "analysis", std::move(params), std::move(outputs));
  return 0;
}

struct PlotFlags {
  std::string input;
  std::string kind = "spectrum";
  std::string script;
  std::string image;
};

int cmd_plot(const PlotFlags& f, std::ostream& out) {
  const std::string image = f.image.empty() ? fs::path(f.input).replace_extension(".png").string() : f.image;
  const std::string text = gnuplot_script(f.kind, f.input, image);
  if (f.script.empty()) {
    out << text;
  } else {
    write_text(f.script, text);
    out << "wrote " << f.script << '\n';
  }
  return 0;
}

}  // namespace

int resolve_threads(int flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("FAAO_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  return 0;
}

std::string gnuplot_script(const std::string& kind, const std::string& csv_path, const std::string& image_path) {
  std::ostringstream s;
  s << "set terminal pngcairo size 800,600\n"
    << "set output '" << image_path << "'\n"
    << "set datafile separator ','\n"
    << "set key off\n"
    << "set grid\n";
  if (kind == "spectrum") {
    s << "set xlabel 'Re'\nset ylabel 'Im'\n"
      << "plot '" << csv_path << "' skip 1 using 1:2 with points pt 7 ps 0.6\n";
  } else if (kind == "errors") {
    s << "set logscale xy\nset key top right\nset xlabel 'M'\nset ylabel 'error'\n"
      << "plot '" << csv_path << "' skip 1 using 1:3 with linespoints title 'Err_inf', \\\n"
      << "     '' skip 1 using 1:4 with linespoints title 'Err_2'\n";
  } else {
    throw std::invalid_argument("unknown plot kind: " + kind);
  }
  return s.str();
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"All-at-once solver for time-space fractional diffusion with bilateral preconditioning"};
  app.set_version_flag("--version", FAAO_VERSION);
  app.require_subcommand(1);

  ProblemFlags solve_pf;
  SolverFlags solve_sf;
  OutputFlags solve_of;
  CLI::App* solve = app.add_subcommand("solve", "solve one problem and write the solution");
  add_problem_flags(solve, solve_pf);
  add_grid_flags(solve, solve_pf);
  add_solver_flags(solve, solve_sf);
  add_output_flags(solve, solve_of);

  ProblemFlags conv_pf;
  LadderFlags conv_lf;
  SolverFlags conv_sf;
  OutputFlags conv_of;
  CLI::App* conv = app.add_subcommand("convergence", "run a refinement ladder and tabulate observed orders");
  add_problem_flags(conv, conv_pf);
  add_solver_flags(conv, conv_sf);
  add_output_flags(conv, conv_of);
  conv->add_option("--ladder", conv_lf.ladder, "refine time (N follows M) or space (fixed M)")
      ->check(CLI::IsMember({"time", "space"}));
  conv->add_option("--Ms", conv_lf.Ms, "time ladder M values")->delimiter(',')->check(CLI::Range(3, 1 << 20));
  conv->add_option("--Ns", conv_lf.Ns, "space ladder N values")->delimiter(',')->check(CLI::Range(3, 1 << 20));
  conv->add_option("--M", conv_lf.M, "fixed M of the space ladder")->check(CLI::Range(3, 1 << 20));

  ProblemFlags an_pf;
  AnalysisFlags an_af;
  OutputFlags an_of;
  CLI::App* an = app.add_subcommand("analysis", "condition numbers and spectra");
  add_problem_flags(an, an_pf);
  add_grid_flags(an, an_pf);
  add_output_flags(an, an_of);
  an->add_option("--matrix", an_af.matrices, "M, PlinvM, MPrinv, PlinvMPrinv, AtPlusAtT, GtauinvGbeta")
      ->delimiter(',')
      ->check(CLI::IsMember({"M", "PlinvM", "MPrinv", "PlinvMPrinv", "AtPlusAtT", "GtauinvGbeta"}));
  an->add_option("--method", an_af.method, "dense SVD or iterative estimate")->check(CLI::IsMember({"dense", "iterative"}));
  an->add_flag("--spectrum", an_af.spectrum, "also dump dense eigenvalues per matrix");

  PlotFlags plot_f;
  CLI::App* plot = app.add_subcommand("plot", "emit a gnuplot script for a CSV output");
  plot->add_option("--input", plot_f.input, "CSV written by analysis or convergence")->required();
  plot->add_option("--kind", plot_f.kind, "spectrum or errors")->check(CLI::IsMember({"spectrum", "errors"}));
  plot->add_option("--script", plot_f.script, "script path (stdout when omitted)");
  plot->add_option("--image", plot_f.image, "PNG path the script renders to");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (solve->parsed()) return cmd_solve(solve_pf, solve_sf, solve_of, out);
    if (conv->parsed()) return cmd_convergence(conv_pf, conv_lf, conv_sf, conv_of, out);
    if (an->parsed()) return cmd_analysis(an_pf, an_af, an_of, out);
    if (plot->parsed()) return cmd_plot(plot_f, out);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace faao::cli
