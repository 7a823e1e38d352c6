#include "shb/csv.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace shb {

CsvWriter::CsvWriter(std::vector<std::string> header) : width_(header.size()) {
  std::string line;
  for (size_t i = 0; i < header.size(); ++i) {
    if (i) line += ',';
    line += header[i];
  }
  lines_.push_back(std::move(line));
}

std::string CsvWriter::format(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void CsvWriter::add_row(const std::vector<double>& values) {
  if (values.size() != width_)
    throw std::invalid_argument("CsvWriter: row width does not match header");
  std::string line;
  for (size_t i = 0; i < values.size(); ++i) {
    if (i) line += ',';
    line += format(values[i]);
  }
  lines_.push_back(std::move(line));
}

void CsvWriter::add_raw_row(const std::vector<std::string>& fields) {
  std::string line;
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i) line += ',';
    line += fields[i];
  }
  lines_.push_back(std::move(line));
}

std::string CsvWriter::str() const {
  std::string out;
  for (const auto& l : lines_) {
    out += l;
    out += '\n';
  }
  return out;
}

void CsvWriter::write_file(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("CsvWriter: cannot open '" + path + "'");
  f << str();
}

}  // namespace shb
