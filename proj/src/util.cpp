#include "wbqa/util.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>

namespace wbqa {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string lower(const std::string& s) {
    std::string out = s;
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return out;
}

std::string upper(const std::string& s) {
    std::string out = s;
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return std::toupper(c); });
    return out;
}

std::string fold(const std::string& s) { return lower(trim(s)); }

std::vector<std::string> tokenize(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (unsigned char c : s) {
        if (std::isalnum(c)) {
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else if (!cur.empty()) {
            out.push_back(cur);
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

std::size_t edit_distance(const std::string& a_raw, const std::string& b_raw) {
    const std::string a = fold(a_raw);
    const std::string b = fold(b_raw);
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

bool approx_eq(double a, double b, double rel, double abs_tol) {
    double diff = std::fabs(a - b);
    if (diff <= abs_tol) return true;
    return diff <= rel * std::max(std::fabs(a), std::fabs(b));
}

json number_value(double v) {
    if (std::isfinite(v) && std::floor(v) == v && std::fabs(v) < 9.0e15)
        return json(static_cast<std::int64_t>(v));
    return json(v);
}

std::string render_number(double v) { return number_value(v).dump(); }

bool coerce_number(const json& v, double& out) {
    if (v.is_number()) {
        out = v.get<double>();
        return true;
    }
    if (v.is_boolean()) return false;
    if (v.is_string()) {
        const std::string s = trim(v.get<std::string>());
        if (s.empty()) return false;
        try {
            std::size_t pos = 0;
            out = std::stod(s, &pos);
            return pos == s.size();
        } catch (...) {
            return false;
        }
    }
    return false;
}

bool semantic_eq(const json& a, const json& b) {
    double na = 0, nb = 0;
    if (coerce_number(a, na) && coerce_number(b, nb))
        return approx_eq(na, nb, 1e-9, 1e-12);
    if (a.is_boolean() || b.is_boolean()) {
        if (a.is_boolean() && b.is_boolean()) return a == b;
        return false;
    }
    if (a.is_null() || b.is_null()) return a.is_null() && b.is_null();
    if (a.is_string() && b.is_string())
        return fold(a.get<std::string>()) == fold(b.get<std::string>());
    if (a.is_array() && b.is_array()) {
        if (a.size() != b.size()) return false;
        std::vector<bool> used(b.size(), false);
        for (const auto& ea : a) {
            bool found = false;
            for (std::size_t j = 0; j < b.size(); ++j) {
                if (!used[j] && semantic_eq(ea, b[j])) {
                    used[j] = true;
                    found = true;
                    break;
                }
            }
            if (!found) return false;
        }
        return true;
    }
    if (a.is_object() && b.is_object()) {
        if (a.size() != b.size()) return false;
        for (auto it = a.begin(); it != a.end(); ++it) {
            if (!b.contains(it.key())) return false;
            if (!semantic_eq(it.value(), b.at(it.key()))) return false;
        }
        return true;
    }
    return false;
}

}  // namespace wbqa
