#include "chemotax/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "chemotax/core.hpp"

namespace fs = std::filesystem;

namespace chemotax {

std::string format_double(double x) {
  // Try increasing precision until the value round-trips exactly;
  // 17 significant digits always suffice for IEEE doubles.
  char buf[40];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, x);
    double back = 0.0;
    std::sscanf(buf, "%lf", &back);
    if (back == x || (back != back && x != x)) return buf;
  }
  return buf;
}

void atomic_write(const std::string& path, const std::string& content) {
  fs::path target(path);
  std::error_code ec;
  if (target.has_parent_path()) {
    fs::create_directories(target.parent_path(), ec);
    if (ec) throw Error(Errc::Io, "cannot create " + target.parent_path().string());
  }
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::Io, "cannot open " + tmp.string());
    out.write(content.data(), std::streamsize(content.size()));
    out.flush();
    if (!out) throw Error(Errc::Io, "short write to " + tmp.string());
  }
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(Errc::Io, "cannot move " + tmp.string() + " into place");
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CsvBuilder::CsvBuilder(std::vector<std::string> columns)
    : columns_(std::move(columns)) {}

void CsvBuilder::add_row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_double(v));
  add_row_raw(cells);
}

void CsvBuilder::add_row_raw(const std::vector<std::string>& cells) {
  if (cells.size() != columns_.size())
    throw Error(Errc::BadValue, "csv row width mismatch");
  for (size_t i = 0; i < cells.size(); ++i) {
    if (i) body_ += ',';
    body_ += cells[i];
  }
  body_ += '\n';
  ++rows_;
}

std::string CsvBuilder::str() const {
  std::string out;
  for (size_t i = 0; i < columns_.size(); ++i) {
    if (i) out += ',';
    out += columns_[i];
  }
  out += '\n';
  out += body_;
  return out;
}

}  // namespace chemotax
