#pragma once

#include <string>
#include <vector>

namespace tpdsim {

// All numeric output is formatted with 12 significant digits ("%.12g") so
// identical configurations produce byte-identical files.
std::string format_number(double v);

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void add_row(const std::vector<std::string>& cells);
  void add_numeric_row(const std::vector<double>& values);
  std::string str() const;
  void write(const std::string& path) const;

 private:
  std::string body_;
  size_t columns_ = 0;
};

// Minimal gnuplot command text for a CSV produced above: one `plot` line per
// named column against the first column.
std::string gnuplot_script(const std::string& csv_name,
                           const std::vector<std::string>& columns,
                           const std::string& title);

}  // namespace tpdsim
