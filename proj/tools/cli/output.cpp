#include "cli/output.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <unistd.h>

#include "sharpfid/error.hpp"

namespace sharpfid::cli {

std::string format_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

namespace {

std::string quote(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void append_line(std::string& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += quote(fields[i]);
  }
  out += "\r\n";
}

}  // namespace

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<std::string> fields) {
  if (fields.size() != header_.size()) {
    throw std::logic_error("CsvTable: row has " + std::to_string(fields.size()) +
                           " fields, header has " + std::to_string(header_.size()));
  }
  rows_.push_back(std::move(fields));
}

std::string CsvTable::str() const {
  std::string out;
  append_line(out, header_);
  for (const auto& row : rows_) append_line(out, row);
  return out;
}

void write_atomic(const std::filesystem::path& path, const std::string& contents) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    f << contents;
    f.flush();
    if (!f) throw NumericalError("could not write " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string record_to_csv(const nlohmann::ordered_json& record) {
  std::vector<std::string> keys, values;
  for (const auto& [key, value] : record.items()) {
    keys.push_back(key);
    if (value.is_number_float()) {
      values.push_back(format_number(value.get<double>()));
    } else if (value.is_string()) {
      values.push_back(value.get<std::string>());
    } else if (value.is_null()) {
      values.emplace_back();
    } else {
      values.push_back(value.dump());
    }
  }
  CsvTable t(keys);
  t.add_row(values);
  return t.str();
}

}  // namespace sharpfid::cli
