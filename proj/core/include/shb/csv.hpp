#pragma once

#include <string>
#include <vector>

namespace shb {

// Minimal CSV writer: '.' decimal separator, 17 significant digits, header
// row mandatory.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);

  void add_row(const std::vector<double>& values);
  // Free-form row (footers such as the fitted-slope line).
  void add_raw_row(const std::vector<std::string>& fields);

  std::string str() const;
  void write_file(const std::string& path) const;

  static std::string format(double v);

 private:
  std::vector<std::string> lines_;
  size_t width_;
};

}  // namespace shb
