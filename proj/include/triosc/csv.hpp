#pragma once

#include <string>
#include <vector>

namespace triosc {

// Fixed 17-significant-digit decimal form: round-trips every double and is
// identical across runs.
std::string format_double(double v);

struct CsvTable {
  std::vector<std::string> comments;  // emitted as "# ..." lines before the header
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Writes to a temporary sibling then renames into place, so a partial file
// never lands at the target path. Throws IoError on any filesystem failure.
void write_csv(const std::string& path, const CsvTable& table);

}  // namespace triosc
