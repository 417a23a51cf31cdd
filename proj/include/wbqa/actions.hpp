#pragma once

#include "wbqa/tools.hpp"
#include "wbqa/util.hpp"

#include <string>
#include <vector>

namespace wbqa {

// How a predicted call is matched against a pattern:
//   Exact        scalar arguments compared by value (case-folded strings,
//                numeric tolerance)
//   Multiset     list arguments compared as multisets, scalars exact
//   SearchResult a search call matches if its returned rows name the correct
//                indicator (raw name or any paraphrase)
//   IndicatorName a get_indicator_code_from_name call matches if its argument
//                is any name of the correct indicator
enum class MatchRule { Exact, Multiset, SearchResult, IndicatorName };

std::string match_rule_name(MatchRule rule);
MatchRule match_rule_from_name(const std::string& name);

struct ActionPattern {
    std::string tool;
    json args = json::object();
    MatchRule match = MatchRule::Exact;
    std::vector<std::string> accept_names;  // SearchResult / IndicatorName only

    json to_json() const;
    static ActionPattern from_json(const json& v);
    bool operator==(const ActionPattern&) const = default;
};

struct EssentialActionSet {
    std::vector<ActionPattern> patterns;

    // duplicate patterns collapse so that replaying the set scores perfectly
    void add(ActionPattern pattern);
    std::size_t size() const { return patterns.size(); }
    bool empty() const { return patterns.empty(); }

    json to_json() const;
    static EssentialActionSet from_json(const json& v);
};

// rule applied when comparing two predicted calls for the duplicate penalty,
// and when matching Exact/Multiset patterns; list-argument tools compare
// their lists as multisets
bool call_args_equal(const std::string& tool, const json& a, const json& b);

// does a normalized predicted call (with the payload its execution returned)
// satisfy this pattern?
bool pattern_matches(const ActionPattern& pattern, const std::string& tool, const json& args,
                     const json& result_payload);

}  // namespace wbqa
