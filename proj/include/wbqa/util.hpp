#pragma once

#include <json.hpp>

#include <string>
#include <vector>

namespace wbqa {

// Field order in serialized records is part of the file contracts, so the
// ordered variant is used project-wide.
using json = nlohmann::ordered_json;

std::string trim(const std::string& s);
std::string lower(const std::string& s);
std::string upper(const std::string& s);
// lowercase + trim; the canonical form for name comparisons
std::string fold(const std::string& s);

// split into lowercased alphanumeric runs ("Rail lines (total route-km)" ->
// ["rail","lines","total","route","km"])
std::vector<std::string> tokenize(const std::string& s);

std::string join(const std::vector<std::string>& parts, const std::string& sep);

// levenshtein distance on folded strings, used for nearest-match suggestions
std::size_t edit_distance(const std::string& a, const std::string& b);

bool approx_eq(double a, double b, double rel, double abs_tol);

// doubles that hold integral values render as integers ("5", not "5.0")
json number_value(double v);
std::string render_number(double v);

// tolerant deep equality: numbers within 1e-9 relative, strings case-folded
// and trimmed, arrays compared as multisets, numeric strings coerced
bool semantic_eq(const json& a, const json& b);

// extract a double from a json number or a numeric string; returns false if
// the value is neither
bool coerce_number(const json& v, double& out);

}  // namespace wbqa
