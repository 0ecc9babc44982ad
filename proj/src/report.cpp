#include "stochsync/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "stochsync/errors.hpp"

namespace stochsync {

namespace {

nlohmann::json number_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace

nlohmann::json to_json(const SyncCertificate& cert) {
  nlohmann::json constants = nlohmann::json::object();
  for (const auto& [name, c] : cert.constants) {
    constants[name] = {{"value", number_or_null(c.value)}, {"provenance", to_string(c.provenance)}};
  }
  return {{"theorem", to_string(cert.theorem)},
          {"constants", constants},
          {"lhs", number_or_null(cert.lhs)},
          {"rhs", number_or_null(cert.rhs)},
          {"margin", number_or_null(cert.margin)},
          {"verdict", cert.verdict},
          {"verdict_text", cert.verdict_text()},
          {"inequality", cert.inequality()}};
}

nlohmann::json to_json(const MetricsReport& report) {
  nlohmann::json j;
  j["order_parameter"] = report.order_parameter ? nlohmann::json(*report.order_parameter) : nlohmann::json();
  j["lyapunov_estimate"] = number_or_null(report.lyapunov_estimate);
  if (std::isinf(report.lyapunov_estimate) && report.lyapunov_estimate < 0) j["sync_error_collapsed"] = true;
  j["fit_window"] = {report.fit_window.t_start, report.fit_window.t_end};
  j["final_spread"] = number_or_null(report.final_spread);
  j["transient_cut"] = report.transient_cut;
  return j;
}

nlohmann::json to_json(const MaoConstants& m) {
  return {{"p", m.p}, {"c1", m.c1}, {"c2", m.c2}, {"c3", m.c3}, {"rate_bound", m.rate_bound}, {"stable", m.stable}};
}

nlohmann::json spectrum_json(const Graph& g, const LaplacianSpectrum<double>& s) {
  std::vector<double> ev(s.eigenvalues.data(), s.eigenvalues.data() + s.eigenvalues.size());
  return {{"name", g.name()},
          {"node_count", g.node_count()},
          {"edge_count", g.edges().size()},
          {"max_degree", g.max_degree()},
          {"eigenvalues", ev},
          {"lambda2", s.lambda2},
          {"lambdaN", s.lambdaN},
          {"connected", is_connected(s)}};
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw ValidationError("csv: no column '" + name + "'");
}

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
  };
  if (!std::getline(in, line)) throw ValidationError("csv: empty input");
  table.header = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != table.header.size()) throw ValidationError("csv: ragged row");
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(std::strtod(c.c_str(), nullptr));
    table.rows.push_back(std::move(row));
  }
  return table;
}

CsvTable read_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  return read_csv(in);
}

}  // namespace stochsync
