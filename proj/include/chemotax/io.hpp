#pragma once

// Small file and CSV helpers shared by the experiments and the CLI.
// All writes are atomic: content goes to a temp file in the target
// directory and is renamed into place, so readers never see a partial
// file.

#include <string>
#include <vector>

namespace chemotax {

// Shortest decimal form that round-trips the exact double value.
std::string format_double(double x);

// Writes content to path via temp-file + rename. Creates parent
// directories. Throws Error{Io} on failure.
void atomic_write(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

// Row-oriented CSV accumulator; render with str(), persist with
// atomic_write.
class CsvBuilder {
 public:
  explicit CsvBuilder(std::vector<std::string> columns);

  void add_row(const std::vector<double>& values);
  void add_row_raw(const std::vector<std::string>& cells);
  const std::vector<std::string>& columns() const { return columns_; }
  size_t rows() const { return rows_; }
  std::string str() const;

 private:
  std::vector<std::string> columns_;
  std::string body_;
  size_t rows_ = 0;
};

}  // namespace chemotax
