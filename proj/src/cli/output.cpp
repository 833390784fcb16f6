#include "dam/cli/output.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <system_error>

namespace dam::cli {

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

nlohmann::ordered_json number_or_infinite(double v) {
  if (std::isinf(v)) return v > 0 ? "infinite" : "-infinite";
  return v;
}

CsvWriter::CsvWriter(std::string kind, std::vector<std::string> columns) : width_(columns.size()) {
  buf_ = "# damctl " + kind + " v1\n";
  for (std::size_t i = 0; i < columns.size(); ++i) buf_ += (i ? "," : "") + columns[i];
  buf_ += '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(fmt(v));
  row(cells);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != width_) throw std::logic_error("csv row width mismatch");
  for (std::size_t i = 0; i < cells.size(); ++i) buf_ += (i ? "," : "") + cells[i];
  buf_ += '\n';
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw std::runtime_error("cannot rename " + tmp.string() + ": " + ec.message());
}

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j) {
  // nlohmann prints doubles with max_digits10 round-trip, independent of locale
  write_atomic(path, j.dump(2) + "\n");
}

}  // namespace dam::cli
