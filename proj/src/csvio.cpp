#include "tpdsim/csvio.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace tpdsim {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

CsvWriter::CsvWriter(std::vector<std::string> header)
    : columns_(header.size()) {
  if (header.empty()) throw std::invalid_argument("empty csv header");
  for (size_t i = 0; i < header.size(); ++i) {
    if (i) body_ += ',';
    body_ += header[i];
  }
  body_ += '\n';
}

void CsvWriter::add_row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_)
    throw std::invalid_argument("csv row width mismatch");
  for (size_t i = 0; i < cells.size(); ++i) {
    if (i) body_ += ',';
    body_ += cells[i];
  }
  body_ += '\n';
}

void CsvWriter::add_numeric_row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_number(v));
  add_row(cells);
}

std::string CsvWriter::str() const { return body_; }

void CsvWriter::write(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << body_;
}

std::string gnuplot_script(const std::string& csv_name,
                           const std::vector<std::string>& columns,
                           const std::string& title) {
  std::string s;
  s += "set datafile separator ','\n";
  s += "set key autotitle columnhead\n";
  s += "set title '" + title + "'\n";
  s += "plot ";
  for (size_t i = 0; i < columns.size(); ++i) {
    if (i) s += ", \\\n     ";
    s += "'" + csv_name + "' using 1:'" + columns[i] + "' with lines";
  }
  s += "\n";
  return s;
}

}  // namespace tpdsim
