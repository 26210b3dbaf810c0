#include "credkit/csv.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "credkit/errors.hpp"

namespace credkit::csv {

std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.emplace_back(line.substr(start));
      break;
    }
    out.emplace_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::string join(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out.push_back(',');
    out += fields[i];
  }
  return out;
}

std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string format_fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return std::string(buf);
}

double parse_double(std::string_view s, std::size_t line_no, std::string_view column) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    fail(Errc::parse_error, "line " + std::to_string(line_no) + ": bad number '" + std::string(s) +
                                "' in column " + std::string(column));
  }
  return v;
}

long long parse_int(std::string_view s, std::size_t line_no, std::string_view column) {
  long long v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    fail(Errc::parse_error, "line " + std::to_string(line_no) + ": bad integer '" + std::string(s) +
                                "' in column " + std::string(column));
  }
  return v;
}

Reader::Reader(const std::string& path) : path_(path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::missing_input, "cannot open " + path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1) {
      header = split(line);
    } else {
      if (line.empty()) continue;
      rows.push_back(split(line));
      row_lines.push_back(line_no);
    }
  }
  if (line_no == 0) fail(Errc::schema_error, path + ": empty file, header expected");
}

std::size_t Reader::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  fail(Errc::schema_error, path_ + ": missing column '" + std::string(name) + "'");
}

std::optional<std::size_t> Reader::optional_column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  return std::nullopt;
}

Writer::Writer(const std::string& path) : path_(path), tmp_path_(path + ".tmp"), open_(true) {
  buffer_.reserve(1 << 16);
}

Writer::~Writer() {
  if (open_) {
    // Abandoned without close(): drop the temp file, keep the target intact.
    std::error_code ec;
    std::filesystem::remove(tmp_path_, ec);
  }
}

void Writer::write_row(const std::vector<std::string>& fields) { write_line(join(fields)); }

void Writer::write_line(std::string_view line) {
  buffer_.append(line);
  buffer_.push_back('\n');
}

void Writer::close() {
  std::ofstream out(tmp_path_, std::ios::binary | std::ios::trunc);
  if (!out) fail(Errc::io_error, "cannot write " + tmp_path_);
  out.write(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
  out.flush();
  if (!out) fail(Errc::io_error, "write failed for " + tmp_path_);
  out.close();
  std::error_code ec;
  std::filesystem::rename(tmp_path_, path_, ec);
  if (ec) fail(Errc::io_error, "rename " + tmp_path_ + " -> " + path_ + ": " + ec.message());
  open_ = false;
}

}  // namespace credkit::csv
