#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "evt/data_matrix.hpp"

namespace evt {

enum class Transform
{
  None,
  // Per-cell negation, for series whose losses sit in the lower tail.
  Negate,
};

// A rectangular numeric CSV loaded into memory.  Column names come from
// the header row when one is present, otherwise they are col1..colp.
struct Dataset {
  DataMatrix matrix;
  std::vector<std::string> column_names;
  bool had_header = false;
  Transform transform = Transform::None;
  std::string path;
};

// Accepts RFC-4180-style CSV: optional quoted fields, optional header
// row (auto-detected: a first row that fails to parse as numbers is a
// header), CRLF or LF line endings.  Every data cell must parse as a
// finite double; errors name the 1-based row and column.  Requires at
// least 2 rows and 1 column.
Dataset ingest_csv(const std::string& path, Transform transform = Transform::None);
Dataset parse_csv_text(const std::string& text, Transform transform = Transform::None,
                       const std::string& origin = "<memory>");

// Writes a header row and the matrix with shortest round-trip number
// formatting, so ingest(write(m)) reproduces m bit for bit.
std::string csv_text(const DataMatrix& matrix,
                     const std::vector<std::string>& column_names);
void write_csv(const std::string& path, const DataMatrix& matrix,
               const std::vector<std::string>& column_names);

// Reads one positive real per line (blank lines and '#' comments
// skipped): the specified null vector.
std::vector<double> load_gamma0(const std::string& path, std::size_t expected_p);

}  // namespace evt
