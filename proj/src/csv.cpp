#include "snowtrend/csv.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

#include "snowtrend/dataset.hpp"

namespace snowtrend {

std::size_t CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end())
    throw std::runtime_error("missing CSV column '" + name + "'");
  return static_cast<std::size_t>(it - header.begin());
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (const char c : field) {
    out += c;
    if (c == '"') out += '"';
  }
  out += '"';
  return out;
}

namespace {

// One record, honoring quoted fields (which may span lines). Returns false at
// end of input.
bool parse_record(const std::string& text, std::size_t& pos,
                  std::vector<std::string>& fields) {
  fields.clear();
  if (pos >= text.size()) return false;
  std::string cur;
  bool quoted = false;
  while (pos < text.size()) {
    const char c = text[pos];
    if (quoted) {
      if (c == '"') {
        if (pos + 1 < text.size() && text[pos + 1] == '"') {
          cur += '"';
          pos += 2;
        } else {
          quoted = false;
          ++pos;
        }
      } else {
        cur += c;
        ++pos;
      }
      continue;
    }
    if (c == '"' && cur.empty()) {
      quoted = true;
      ++pos;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
      ++pos;
    } else if (c == '\r' || c == '\n') {
      if (c == '\r' && pos + 1 < text.size() && text[pos + 1] == '\n') ++pos;
      ++pos;
      break;
    } else {
      cur += c;
      ++pos;
    }
  }
  if (quoted) throw std::runtime_error("unterminated quoted CSV field");
  fields.push_back(std::move(cur));
  return true;
}

}  // namespace

CsvTable read_csv(const std::string& path) {
  const std::string text = read_text_file(path);
  CsvTable table;
  std::size_t pos = 0;
  if (!parse_record(text, pos, table.header))
    throw std::runtime_error("empty CSV file " + path);
  std::vector<std::string> fields;
  while (parse_record(text, pos, fields)) {
    if (fields.size() == 1 && fields[0].empty()) continue;  // trailing newline
    if (fields.size() != table.header.size())
      throw std::runtime_error("ragged CSV row in " + path + ": expected " +
                               std::to_string(table.header.size()) +
                               " fields, got " + std::to_string(fields.size()));
    table.rows.push_back(fields);
  }
  return table;
}

void write_csv(const std::string& path, const CsvTable& table) {
  std::string out;
  const auto append_row = [&out](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += csv_escape(row[i]);
    }
    out += "\r\n";
  };
  append_row(table.header);
  for (const auto& row : table.rows) append_row(row);
  atomic_write_text(path, out);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string format_fixed(double v, int decimals) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

double parse_double(const std::string& s) {
  if (s.empty()) throw std::runtime_error("empty numeric field");
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size())
    throw std::runtime_error("trailing characters in number '" + s + "'");
  return v;
}

}  // namespace snowtrend
