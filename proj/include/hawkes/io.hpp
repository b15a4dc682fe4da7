#pragma once

#include <string>
#include <vector>

namespace hawkes::io {

// Writes to a sibling temp file, then renames over the target, so a failed
// write never leaves a partial file behind. Throws IoError.
void write_file_atomic(const std::string& path, const std::string& contents);

std::string read_file(const std::string& path);

// Splits one CSV record. Handles double-quoted fields and doubled quotes.
std::vector<std::string> split_csv_line(const std::string& line);

// Quotes a field if it contains a comma, quote or newline.
std::string csv_field(const std::string& value);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;  // 1-based source line of each row

  // Column index by name, or -1.
  int column(const std::string& name) const;
};

// Header row required. Blank lines are skipped.
CsvTable parse_csv(const std::string& text);
CsvTable read_csv(const std::string& path);

// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

// Fixed notation with the given decimals, for human-facing labels.
std::string format_fixed(double value, int decimals);

}  // namespace hawkes::io
