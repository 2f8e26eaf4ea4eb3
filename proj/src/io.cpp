#include <stripwall/io.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace stripwall {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

fs::path sidecar_path(const fs::path& csv) { return fs::path(csv.string() + ".json"); }

namespace {

std::vector<std::vector<double>> read_csv_rows(const fs::path& path, const std::string& expected_header,
                                               std::size_t columns) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != expected_header)
    throw std::runtime_error(path.string() + ": expected header '" + expected_header + "'");
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    const char* p = line.c_str();
    for (std::size_t c = 0; c < columns; ++c) {
      char* end = nullptr;
      const double v = std::strtod(p, &end);
      if (end == p) throw std::runtime_error(path.string() + ": malformed row '" + line + "'");
      row.push_back(v);
      p = end;
      if (c + 1 < columns) {
        if (*p != ',') throw std::runtime_error(path.string() + ": malformed row '" + line + "'");
        ++p;
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open sidecar " + path.string());
  return json::parse(in);
}

}  // namespace

void write_field(const fs::path& csv, const ScalarField& field) {
  const auto& g = field.grid;
  std::ofstream out(csv);
  if (!out) throw std::runtime_error("cannot write " + csv.string());
  out << "x,y,theta\n";
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      out << format17(g.x(i)) << ',' << format17(g.y(j)) << ',' << format17(field(i, j)) << '\n';
  std::ofstream side(sidecar_path(csv));
  side << json{{"M", g.half_length}, {"nx", g.nx}, {"ny", g.ny}}.dump(2) << '\n';
}

ScalarField read_field(const fs::path& csv) {
  const json meta = read_json(sidecar_path(csv));
  const StripGrid g = build_grid(meta.at("M").get<double>(), meta.at("nx").get<int>(), meta.at("ny").get<int>());
  const auto rows = read_csv_rows(csv, "x,y,theta", 3);
  if (rows.size() != g.size())
    throw std::runtime_error(csv.string() + ": row count does not match sidecar grid");
  ScalarField f(g);
  for (std::size_t r = 0; r < rows.size(); ++r) f.values[r] = rows[r][2];
  return f;
}

void write_trace(const fs::path& csv, const Trace& trace) {
  std::ofstream out(csv);
  if (!out) throw std::runtime_error("cannot write " + csv.string());
  out << "x,theta\n";
  for (std::size_t i = 0; i < trace.size(); ++i)
    out << format17(trace.x(i)) << ',' << format17(trace.values[i]) << '\n';
  std::ofstream side(sidecar_path(csv));
  side << json{{"window", {trace.x0, trace.x_last()}}, {"spacing", trace.spacing}}.dump(2) << '\n';
}

Trace read_trace(const fs::path& csv) {
  const json meta = read_json(sidecar_path(csv));
  const auto rows = read_csv_rows(csv, "x,theta", 2);
  if (rows.size() < 2) throw std::runtime_error(csv.string() + ": trace needs at least two samples");
  Trace t;
  t.x0 = meta.at("window").at(0).get<double>();
  t.spacing = meta.at("spacing").get<double>();
  t.values.reserve(rows.size());
  for (const auto& r : rows) t.values.push_back(r[1]);
  return t;
}

json to_json(const EnergyBreakdown& e) {
  return json{{"dirichlet", e.dirichlet}, {"zeeman", e.zeeman}, {"boundary", e.boundary},
              {"nonlocal", e.nonlocal},   {"total", e.total}};
}

EnergyBreakdown energy_from_json(const json& j) {
  EnergyBreakdown e;
  e.dirichlet = j.at("dirichlet").get<double>();
  e.zeeman = j.at("zeeman").get<double>();
  e.boundary = j.at("boundary").get<double>();
  e.nonlocal = j.at("nonlocal").get<double>();
  e.total = j.at("total").get<double>();
  return e;
}

}  // namespace stripwall
