#include "wbqa/actions.hpp"

#include <stdexcept>

namespace wbqa {

std::string match_rule_name(MatchRule rule) {
    switch (rule) {
        case MatchRule::Exact: return "exact";
        case MatchRule::Multiset: return "multiset";
        case MatchRule::SearchResult: return "search-result";
        case MatchRule::IndicatorName: return "indicator-name";
    }
    return "exact";
}

MatchRule match_rule_from_name(const std::string& name) {
    if (name == "exact") return MatchRule::Exact;
    if (name == "multiset") return MatchRule::Multiset;
    if (name == "search-result") return MatchRule::SearchResult;
    if (name == "indicator-name") return MatchRule::IndicatorName;
    throw std::runtime_error("unknown match rule: " + name);
}

json ActionPattern::to_json() const {
    json out{{"tool", tool}, {"match", match_rule_name(match)}, {"args", args}};
    if (!accept_names.empty()) out["accept_names"] = accept_names;
    return out;
}

ActionPattern ActionPattern::from_json(const json& v) {
    ActionPattern p;
    p.tool = v.at("tool").get<std::string>();
    p.match = match_rule_from_name(v.at("match").get<std::string>());
    p.args = v.at("args");
    if (v.contains("accept_names"))
        p.accept_names = v.at("accept_names").get<std::vector<std::string>>();
    return p;
}

void EssentialActionSet::add(ActionPattern pattern) {
    for (const auto& existing : patterns)
        if (existing.tool == pattern.tool && existing.match == pattern.match &&
            call_args_equal(pattern.tool, existing.args, pattern.args))
            return;
    patterns.push_back(std::move(pattern));
}

json EssentialActionSet::to_json() const {
    json out = json::array();
    for (const auto& p : patterns) out.push_back(p.to_json());
    return out;
}

EssentialActionSet EssentialActionSet::from_json(const json& v) {
    EssentialActionSet set;
    for (const auto& elem : v) set.patterns.push_back(ActionPattern::from_json(elem));
    return set;
}

bool call_args_equal(const std::string& tool, const json& a, const json& b) {
    (void)tool;  // semantic_eq already treats arrays as multisets, which is the
                 // list-argument rule; scalar arguments are unaffected
    return semantic_eq(a, b);
}

bool pattern_matches(const ActionPattern& pattern, const std::string& tool, const json& args,
                     const json& result_payload) {
    if (pattern.tool != tool) return false;
    switch (pattern.match) {
        case MatchRule::SearchResult: {
            // credited when the call surfaced the right indicator
            if (!result_payload.is_array()) return false;
            for (const auto& row : result_payload) {
                if (!row.is_object() || !row.contains("name") || !row["name"].is_string()) continue;
                const std::string name = fold(row["name"].get<std::string>());
                for (const auto& accept : pattern.accept_names)
                    if (fold(accept) == name) return true;
            }
            return false;
        }
        case MatchRule::IndicatorName: {
            if (!args.is_object() || !args.contains("indicator_name") ||
                !args["indicator_name"].is_string())
                return false;
            const std::string name = fold(args["indicator_name"].get<std::string>());
            for (const auto& accept : pattern.accept_names)
                if (fold(accept) == name) return true;
            return false;
        }
        case MatchRule::Exact:
        case MatchRule::Multiset: return call_args_equal(tool, pattern.args, args);
    }
    return false;
}

}  // namespace wbqa
