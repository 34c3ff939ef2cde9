// Deterministic CSV emission: 15-significant-digit floats, LF line endings,
// no locale dependence.
#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace exab {

inline std::string format_g15(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.15g", x);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header)
      : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot open output file: " + path);
    write_cells(header);
  }

  void row(const std::vector<std::string>& cells) { write_cells(cells); }

  void row_values(const std::vector<double>& values) {
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values) cells.push_back(format_g15(v));
    write_cells(cells);
  }

  void close() {
    if (!out_.is_open()) return;
    out_.close();
    if (!out_) throw std::runtime_error("error writing " + path_);
  }

 private:
  void write_cells(const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
    if (!out_) throw std::runtime_error("error writing " + path_);
  }

  std::string path_;
  std::ofstream out_;
};

}  // namespace exab
