#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace sharpfid::cli {

/// Shortest round-trip form: 17 significant digits.
std::string format_number(double value);

/// RFC 4180 table: header row, comma separated, CRLF line ends, quoted
/// fields where needed.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  void add_row(std::vector<std::string> fields);
  const std::vector<std::string>& header() const noexcept { return header_; }
  std::size_t rows() const noexcept { return rows_.size(); }
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Writes through a temporary file in the same directory and renames it into
/// place, so readers never see a partial file.
void write_atomic(const std::filesystem::path& path, const std::string& contents);

/// One-row CSV of a flat JSON object, keys in insertion order.
std::string record_to_csv(const nlohmann::ordered_json& record);

}  // namespace sharpfid::cli
