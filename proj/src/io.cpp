#include "faao/io.hpp"

#include <charconv>
#include <chrono>
#include <cstring>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace faao::io {

namespace {

using ojson = nlohmann::ordered_json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << text;
}

// Splits one CSV line; fields never contain quotes or commas in our outputs.
std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::string optional_double(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

}  // namespace

ProblemSpec problem_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  if (!j.is_object()) throw std::invalid_argument("problem JSON must be an object");
  static const std::set<std::string> known = {"alpha", "beta", "kappa", "x_left", "x_right",
                                              "t_final", "M", "N", "dims", "example_id"};
  for (const auto& [key, value] : j.items())
    if (!known.contains(key)) throw std::invalid_argument("unknown problem key: " + key);
  ProblemSpec spec;
  if (j.contains("example_id")) {
    spec = ProblemSpec::for_example(parse_example_id(j.at("example_id").get<int>()), spec.alpha, spec.beta, spec.M, spec.N);
  }
  const auto num = [&j](const char* key, double& out) {
    if (j.contains(key)) out = j.at(key).get<double>();
  };
  const auto integer = [&j](const char* key, int& out) {
    if (j.contains(key)) {
      const auto& v = j.at(key);
      if (!v.is_number_integer()) throw std::invalid_argument(std::string(key) + " must be an integer");
      out = v.get<int>();
    }
  };
  num("alpha", spec.alpha);
  num("beta", spec.beta);
  num("kappa", spec.kappa);
  num("x_left", spec.x_left);
  num("x_right", spec.x_right);
  num("t_final", spec.t_final);
  integer("M", spec.M);
  integer("N", spec.N);
  integer("dims", spec.dims);
  spec.validate();
  return spec;
}

ProblemSpec load_problem(const std::string& path) { return problem_from_json(read_file(path)); }

std::string problem_to_json(const ProblemSpec& spec) {
  ojson j;
  j["alpha"] = spec.alpha;
  j["beta"] = spec.beta;
  j["kappa"] = spec.kappa;
  j["x_left"] = spec.x_left;
  j["x_right"] = spec.x_right;
  j["t_final"] = spec.t_final;
  j["M"] = spec.M;
  j["N"] = spec.N;
  j["dims"] = spec.dims;
  j["example_id"] = static_cast<int>(spec.example_id);
  return j.dump(2);
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw std::out_of_range("no CSV column named " + name);
}

void write_csv(const std::string& path, const CsvTable& table, const std::vector<std::string>& comments) {
  std::ostringstream out;
  for (const auto& c : comments) out << "# " << c << '\n';
  for (std::size_t i = 0; i < table.header.size(); ++i) out << (i ? "," : "") << table.header[i];
  out << '\n';
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size()) throw std::invalid_argument("CSV row width differs from header");
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
  write_file(path, out.str());
}

CsvTable read_csv(const std::string& path) {
  std::istringstream in(read_file(path));
  CsvTable t;
  std::string line;
  do {
    if (!std::getline(in, line)) throw std::runtime_error("empty CSV file " + path);
  } while (line.starts_with('#'));
  t.header = split_line(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto row = split_line(line);
    if (row.size() != t.header.size()) throw std::runtime_error("ragged CSV row in " + path);
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

CsvTable solution_table(const SolutionField& field) {
  CsvTable t;
  t.header = field.dims == 1 ? std::vector<std::string>{"x", "t", "value"} : std::vector<std::string>{"x", "y", "t", "value"};
  const std::size_t side = field.nodes_x.size();
  for (std::size_t j = 0; j < field.values.size(); ++j) {
    const std::string tj = format_double(field.nodes_t[j]);
    if (field.dims == 1) {
      for (std::size_t i = 0; i < side; ++i)
        t.rows.push_back({format_double(field.nodes_x[i]), tj, format_double(field.values[j][i])});
    } else {
      for (std::size_t i = 0; i < side; ++i)
        for (std::size_t k = 0; k < side; ++k)
          t.rows.push_back({format_double(field.nodes_x[i]), format_double(field.nodes_x[k]), tj,
                            format_double(field.values[j][i * side + k])});
    }
  }
  return t;
}

void write_binary(const std::string& path, const std::vector<double>& data, const std::vector<std::size_t>& shape,
                  const std::string& manifest) {
  std::size_t count = 1;
  for (std::size_t s : shape) count *= s;
  if (count != data.size()) throw std::invalid_argument("write_binary: shape does not match data");
  {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path);
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size() * sizeof(double)));
  }
  ojson side;
  side["shape"] = shape;
  side["dtype"] = "float64";
  side["order"] = "row-major";
  side["endianness"] = "little";
  side["manifest"] = manifest;
  write_file(path + ".json", side.dump(2));
}

std::vector<double> read_binary(const std::string& path, std::vector<std::size_t>* shape) {
  const nlohmann::json side = nlohmann::json::parse(read_file(path + ".json"));
  const auto dims = side.at("shape").get<std::vector<std::size_t>>();
  std::size_t count = 1;
  for (std::size_t s : dims) count *= s;
  const std::string bytes = read_file(path);
  if (bytes.size() != count * sizeof(double)) throw std::runtime_error("binary dump size does not match its sidecar");
  std::vector<double> data(count);
  std::memcpy(data.data(), bytes.data(), bytes.size());
  if (shape != nullptr) *shape = dims;
  return data;
}

void write_solution_binary(const std::string& path, const SolutionField& field, const std::string& manifest) {
  std::vector<double> flat;
  const std::size_t nodes = field.values.empty() ? 0 : field.values.front().size();
  for (const auto& level : field.values) flat.insert(flat.end(), level.begin(), level.end());
  write_binary(path, flat, {field.values.size(), nodes}, manifest);
}

CsvTable errors_table(const std::vector<int>& M, const std::vector<int>& N, const std::vector<ErrorReport>& reports) {
  CsvTable t;
  t.header = {"M", "N", "err_inf", "err_2", "order_inf", "order_2"};
  for (std::size_t k = 0; k < reports.size(); ++k)
    t.rows.push_back({std::to_string(M[k]), std::to_string(N[k]), format_double(reports[k].err_inf),
                      format_double(reports[k].err_2), optional_double(reports[k].order_inf),
                      optional_double(reports[k].order_2)});
  return t;
}

std::string to_json(const ErrorReport& r) {
  ojson j;
  j["err_inf"] = r.err_inf;
  j["err_2"] = r.err_2;
  j["order_inf"] = r.order_inf ? ojson(*r.order_inf) : ojson(nullptr);
  j["order_2"] = r.order_2 ? ojson(*r.order_2) : ojson(nullptr);
  return j.dump(2);
}

std::string to_json(const RunManifest& m) {
  ojson j;
  j["command"] = m.command;
  ojson params = ojson::object();
  for (const auto& [k, v] : m.parameters) params[k] = v;
  j["parameters"] = params;
  j["seed_irrelevant"] = m.seed_irrelevant;
  j["timestamp"] = m.timestamp;
  j["version"] = m.version;
  j["outputs"] = m.outputs;
  return j.dump(2);
}

RunManifest manifest_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  RunManifest m;
  m.command = j.at("command").get<std::string>();
  for (const auto& [k, v] : j.at("parameters").items()) m.parameters[k] = v.get<std::string>();
  m.seed_irrelevant = j.at("seed_irrelevant").get<bool>();
  m.timestamp = j.at("timestamp").get<std::string>();
  m.version = j.at("version").get<std::string>();
  m.outputs = j.at("outputs").get<std::vector<std::string>>();
  return m;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace faao::io
