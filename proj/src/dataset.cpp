#include "evt/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "evt/errors.hpp"
#include "evt/format.hpp"

namespace evt {

namespace {

// Splits one CSV record; supports double-quoted fields with "" escapes.
std::vector<std::string> split_record(const std::string& line,
                                      std::size_t row_number) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field.push_back(ch);
    }
  }
  if (quoted)
    throw data_error("row " + std::to_string(row_number) +
                     ": unterminated quote");
  fields.push_back(std::move(field));
  return fields;
}

std::string trimmed(const std::string& s) {
  std::size_t begin = 0;
  std::size_t end = s.size();
  while (begin < end && (s[begin] == ' ' || s[begin] == '\t')) ++begin;
  while (end > begin && (s[end - 1] == ' ' || s[end - 1] == '\t')) --end;
  return s.substr(begin, end - begin);
}

bool try_parse_double(const std::string& field, double& out) {
  const std::string t = trimmed(field);
  if (t.empty()) return false;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  const auto res = std::from_chars(first, last, out);
  return res.ec == std::errc{} && res.ptr == last;
}

}  // namespace

Dataset parse_csv_text(const std::string& text, Transform transform,
                       const std::string& origin) {
  std::vector<std::vector<std::string>> rows;
  {
    std::istringstream in(text);
    std::string line;
    std::size_t row_number = 0;
    while (std::getline(in, line)) {
      ++row_number;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      rows.push_back(split_record(line, row_number));
    }
  }
  if (rows.empty()) throw data_error(origin + ": no data");

  const std::size_t p = rows.front().size();
  for (std::size_t r = 0; r < rows.size(); ++r)
    if (rows[r].size() != p)
      throw data_error(origin + ": row " + std::to_string(r + 1) + " has " +
                       std::to_string(rows[r].size()) +
                       " fields, expected " + std::to_string(p));

  // Header detection: a first row that does not parse as numbers
  // throughout is taken as column names.
  bool had_header = false;
  for (const std::string& field : rows.front()) {
    double v;
    if (!try_parse_double(field, v)) {
      had_header = true;
      break;
    }
  }

  Dataset ds;
  ds.had_header = had_header;
  ds.transform = transform;
  ds.path = origin;
  if (had_header) {
    std::set<std::string> seen;
    for (const std::string& name : rows.front()) {
      ds.column_names.push_back(trimmed(name));
      if (!seen.insert(ds.column_names.back()).second)
        throw data_error(origin + ": duplicate column name '" +
                         ds.column_names.back() + "'");
    }
  } else {
    for (std::size_t j = 0; j < p; ++j)
      ds.column_names.push_back("col" + std::to_string(j + 1));
  }

  const std::size_t first_data = had_header ? 1 : 0;
  const std::size_t n = rows.size() - first_data;
  if (n < 2)
    throw data_error(origin + ": need at least 2 data rows, got " +
                     std::to_string(n));

  ds.matrix = DataMatrix(n, p);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t j = 0; j < p; ++j) {
      double v;
      const std::string& field = rows[r + first_data][j];
      if (!try_parse_double(field, v) || !std::isfinite(v))
        throw data_error(origin + ": cannot read a finite number at row " +
                         std::to_string(r + first_data + 1) + ", column " +
                         std::to_string(j + 1) + " ('" + field + "')");
      ds.matrix.at(r, j) = transform == Transform::Negate ? -v : v;
    }
  }
  return ds;
}

Dataset ingest_csv(const std::string& path, Transform transform) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot open dataset: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_csv_text(buffer.str(), transform, path);
}

std::string csv_text(const DataMatrix& matrix,
                     const std::vector<std::string>& column_names) {
  if (column_names.size() != matrix.cols())
    throw parameter_error("have " + std::to_string(column_names.size()) +
                          " column names for " + std::to_string(matrix.cols()) +
                          " columns");
  std::ostringstream out;
  for (std::size_t j = 0; j < column_names.size(); ++j) {
    if (j) out << ',';
    out << column_names[j];
  }
  out << '\n';
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    for (std::size_t j = 0; j < matrix.cols(); ++j) {
      if (j) out << ',';
      out << format_double(matrix.at(r, j));
    }
    out << '\n';
  }
  return out.str();
}

void write_csv(const std::string& path, const DataMatrix& matrix,
               const std::vector<std::string>& column_names) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot write: " + path);
  out << csv_text(matrix, column_names);
  if (!out) throw data_error("write failed: " + path);
}

std::vector<double> load_gamma0(const std::string& path,
                                std::size_t expected_p) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open null index file: " + path);
  std::vector<double> gamma0;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const std::string t = trimmed(line);
    if (t.empty()) continue;
    double v;
    if (!try_parse_double(t, v) || !std::isfinite(v) || !(v > 0.0))
      throw data_error(path + ": line " + std::to_string(line_number) +
                       ": expected one positive real, got '" + t + "'");
    gamma0.push_back(v);
  }
  if (gamma0.size() != expected_p)
    throw data_error(path + ": has " + std::to_string(gamma0.size()) +
                     " entries but the data has " + std::to_string(expected_p) +
                     " dimensions");
  return gamma0;
}

}  // namespace evt
