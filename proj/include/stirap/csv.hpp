#ifndef STIRAP_CSV_HPP
#define STIRAP_CSV_HPP

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

namespace stirap {

/// Comma-separated table with a header row, LF line endings and floats at a
/// fixed number of significant digits. Non-finite values print as nan/inf.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header, int precision = 12);

  CsvWriter& cell(double v);
  CsvWriter& cell(const std::string& s);
  CsvWriter& cell(long long v);
  void end_row();
  void close();

  static std::string format(double v, int precision);

 private:
  void separator();

  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t columns_;
  std::size_t filled_ = 0;
  int precision_;
};

/// Writes `text` to `path` byte-for-byte.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace stirap

#endif  // STIRAP_CSV_HPP
