#ifndef SADDLESCOPE_CSV_HPP
#define SADDLESCOPE_CSV_HPP

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "saddlescope/errors.hpp"

namespace saddlescope {

// CSV writer with fixed %.17g number formatting: outputs round-trip exactly
// and byte-identically across runs.
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path) : out_(path) {
    if (!out_) throw StructuralError("cannot open output file '" + path + "'");
  }

  void header(const std::vector<std::string>& columns) { row_strings(columns); }

  void row_strings(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }

  void row(const std::vector<double>& values) {
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values) cells.push_back(format(v));
    row_strings(cells);
  }

  static std::string format(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
  }

 private:
  std::ofstream out_;
};

}  // namespace saddlescope

#endif
