#include "stirap/csv.hpp"

#include <cmath>
#include <cstdio>

#include "stirap/errors.hpp"

namespace stirap {

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header, int precision)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc), columns_(header.size()), precision_(precision) {
  if (!out_) throw ConfigError("cannot write " + path.string());
  for (const std::string& h : header) cell(h);
  end_row();
}

std::string CsvWriter::format(double v, int precision) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0) v = 0;  // no "-0"
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", precision, v);
  return buf;
}

void CsvWriter::separator() {
  if (filled_ == columns_) throw std::logic_error("CsvWriter: too many cells in row of " + path_.string());
  if (filled_++ > 0) out_ << ',';
}

CsvWriter& CsvWriter::cell(double v) {
  separator();
  out_ << format(v, precision_);
  return *this;
}

CsvWriter& CsvWriter::cell(const std::string& s) {
  separator();
  out_ << s;
  return *this;
}

CsvWriter& CsvWriter::cell(long long v) {
  separator();
  out_ << v;
  return *this;
}

void CsvWriter::end_row() {
  if (filled_ != columns_) throw std::logic_error("CsvWriter: short row in " + path_.string());
  out_ << '\n';
  filled_ = 0;
}

void CsvWriter::close() {
  out_.close();
  if (!out_) throw ConfigError("failed writing " + path_.string());
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !(out << text) || (out.close(), !out)) throw ConfigError("cannot write " + path.string());
}

}  // namespace stirap
