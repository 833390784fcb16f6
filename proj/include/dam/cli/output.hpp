#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace dam::cli {

/// Shortest round-trip decimal form, locale independent. inf -> "inf".
std::string fmt(double v);

/// Number, or the string "infinite" for ±inf / NaN-free infinities.
nlohmann::ordered_json number_or_infinite(double v);

class CsvWriter {
 public:
  // First line is "# damctl <kind> v1".
  CsvWriter(std::string kind, std::vector<std::string> columns);

  void row(const std::vector<double>& values);
  void row(const std::vector<std::string>& cells);
  std::string str() const { return buf_; }

 private:
  std::size_t width_;
  std::string buf_;
};

/// Writes via a temporary sibling and rename, so readers never see a partial file.
void write_atomic(const std::filesystem::path& path, const std::string& content);
void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j);

}  // namespace dam::cli
