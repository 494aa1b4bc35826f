#pragma once

#include <span>
#include <string>
#include <vector>

namespace snowtrend {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Column position by header name; throws if absent.
  std::size_t column(const std::string& name) const;
};

// RFC 4180 reader/writer: comma separator, double-quote escaping, CRLF line
// endings on output (LF tolerated on input), UTF-8 passthrough.
CsvTable read_csv(const std::string& path);
void write_csv(const std::string& path, const CsvTable& table);

std::string csv_escape(const std::string& field);

// Fixed shortest-ish numeric formatting ("%.10g") so identical doubles always
// serialize to identical bytes.
std::string format_double(double v);
std::string format_fixed(double v, int decimals);

double parse_double(const std::string& s);  // strict; throws on trailing junk

}  // namespace snowtrend
