#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wbqa::csv {

// RFC-4180-ish: quoted fields may contain the delimiter, doubled quotes, and
// newlines; CRLF line ends tolerated; a trailing newline yields no empty row
std::vector<std::vector<std::string>> parse(std::istream& in, char delim = ',');
std::vector<std::vector<std::string>> parse_file(const std::string& path, char delim = ',');

void write_row(std::ostream& out, const std::vector<std::string>& fields, char delim = ',');

// pick ';' over ',' when a header line contains more semicolons than commas
// (the M49 tabulation is distributed both ways)
char sniff_delim(const std::string& header_line);

}  // namespace wbqa::csv
