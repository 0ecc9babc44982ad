#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "stochsync/conditions.hpp"
#include "stochsync/graph.hpp"
#include "stochsync/metrics.hpp"

namespace stochsync {

nlohmann::json to_json(const SyncCertificate& cert);
nlohmann::json to_json(const MetricsReport& report);
nlohmann::json to_json(const MaoConstants& m);
nlohmann::json spectrum_json(const Graph& g, const LaplacianSpectrum<double>& s);

/// Writes to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// %.10g, with "nan"/"inf"/"-inf" for non-finite values.
std::string format_number(double v);

/// Numeric CSV table with a header row.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name) const;
};

CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::filesystem::path& path);

}  // namespace stochsync
