#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace credkit::csv {

// Minimal CSV handling for the credkit file schemas: comma-separated, no
// quoting (none of our columns may contain commas), LF line endings.

std::vector<std::string> split(std::string_view line);

std::string join(const std::vector<std::string>& fields);

// Shortest decimal form that round-trips through double. Used everywhere a
// float lands in a file so reruns are byte-identical.
std::string format_double(double v);

// Fixed-point with `digits` decimals, for report tables.
std::string format_fixed(double v, int digits);

double parse_double(std::string_view s, std::size_t line_no, std::string_view column);
long long parse_int(std::string_view s, std::size_t line_no, std::string_view column);

struct Reader {
  explicit Reader(const std::string& path);
  // Header line, already split.
  std::vector<std::string> header;
  // Remaining rows; row_lines[i] is the 1-based source line of rows[i].
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> row_lines;

  // Index of a required column, or SchemaError.
  std::size_t column(std::string_view name) const;
  std::optional<std::size_t> optional_column(std::string_view name) const;

 private:
  std::string path_;
};

// Writes lines atomically: everything goes to <path>.tmp and is renamed into
// place on success.
class Writer {
 public:
  explicit Writer(const std::string& path);
  ~Writer();
  Writer(const Writer&) = delete;
  Writer& operator=(const Writer&) = delete;

  void write_row(const std::vector<std::string>& fields);
  void write_line(std::string_view line);
  void close();  // commit (rename); throws IoError on failure

 private:
  std::string path_;
  std::string tmp_path_;
  std::string buffer_;
  bool open_ = false;
};

}  // namespace credkit::csv
