#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace cli {

/// %.17g, with nan/inf spelled out.
std::string format_number(double v);

void ensure_directory(const std::filesystem::path& dir);

/// Comma-separated, header row, LF endings. Columns must have equal length.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns);

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j);

struct CsvInput {
  std::string path;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::uintmax_t bytes = 0;
  std::string content_hash;  ///< hex of std::hash over the raw bytes

  /// Parsed numeric column; throws ConfigError naming the column/row.
  std::vector<double> column(const std::string& name) const;
  bool has_column(const std::string& name) const;
  nlohmann::ordered_json provenance() const;
};

CsvInput read_csv(const std::string& path);

}  // namespace cli
