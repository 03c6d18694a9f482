#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "vortex/cli/format.hpp"
#include "vortex/errors.hpp"

namespace vortex::cli {

// UTF-8, comma separated, '.' decimal point, one header row with
// unit-suffixed column names.
class CsvWriter {
public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& columns)
      : out_(path), n_cols_(columns.size()) {
    if (!out_) throw Error("cannot open " + path.string() + " for writing");
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (i) out_ << ',';
      out_ << columns[i];
    }
    out_ << '\n';
  }

  void row(const std::vector<std::string>& cells) {
    if (cells.size() != n_cols_) throw Error("csv row width mismatch");
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }

private:
  std::ofstream out_;
  std::size_t n_cols_;
};

} // namespace vortex::cli
