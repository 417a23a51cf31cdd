#include "wbqa/csv.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace wbqa::csv {

std::vector<std::vector<std::string>> parse(std::istream& in, char delim) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;  // row has at least one field character/delimiter
    char c;

    auto end_field = [&] {
        row.push_back(field);
        field.clear();
    };
    auto end_row = [&] {
        end_field();
        rows.push_back(row);
        row.clear();
        field_started = false;
    };

    while (in.get(c)) {
        if (in_quotes) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    field.push_back('"');
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(c);
            }
            continue;
        }
        if (c == '"') {
            in_quotes = true;
            field_started = true;
        } else if (c == delim) {
            end_field();
            field_started = true;
        } else if (c == '\r') {
            // swallow; the matching '\n' ends the row
        } else if (c == '\n') {
            if (field_started || !field.empty() || !row.empty()) end_row();
            // bare newline on an empty row: skip blank lines
            else
                field_started = false;
        } else {
            field.push_back(c);
            field_started = true;
        }
    }
    if (in_quotes) throw std::runtime_error("csv: unterminated quoted field");
    if (field_started || !field.empty() || !row.empty()) end_row();
    return rows;
}

std::vector<std::vector<std::string>> parse_file(const std::string& path, char delim) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("csv: cannot open " + path);
    return parse(in, delim);
}

void write_row(std::ostream& out, const std::vector<std::string>& fields, char delim) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out << delim;
        const std::string& f = fields[i];
        bool needs_quotes = f.find(delim) != std::string::npos ||
                            f.find('"') != std::string::npos ||
                            f.find('\n') != std::string::npos ||
                            f.find('\r') != std::string::npos;
        if (needs_quotes) {
            out << '"';
            for (char c : f) {
                if (c == '"') out << '"';
                out << c;
            }
            out << '"';
        } else {
            out << f;
        }
    }
    out << '\n';
}

char sniff_delim(const std::string& header_line) {
    std::size_t commas = 0, semis = 0;
    bool quoted = false;
    for (char c : header_line) {
        if (c == '"') quoted = !quoted;
        if (quoted) continue;
        if (c == ',') ++commas;
        if (c == ';') ++semis;
    }
    return semis > commas ? ';' : ',';
}

}  // namespace wbqa::csv
