#include "wbqa/tools.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace wbqa {

std::string error_kind_name(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::UnknownTool: return "UnknownTool";
        case ErrorKind::BadArguments: return "BadArguments";
        case ErrorKind::NotFound: return "NotFound";
        case ErrorKind::NoData: return "NoData";
        case ErrorKind::ArithmeticError: return "ArithmeticError";
        case ErrorKind::NestedCallRejected: return "NestedCallRejected";
    }
    return "BadArguments";
}

ErrorKind error_kind_from_name(const std::string& name) {
    if (name == "UnknownTool") return ErrorKind::UnknownTool;
    if (name == "BadArguments") return ErrorKind::BadArguments;
    if (name == "NotFound") return ErrorKind::NotFound;
    if (name == "NoData") return ErrorKind::NoData;
    if (name == "ArithmeticError") return ErrorKind::ArithmeticError;
    if (name == "NestedCallRejected") return ErrorKind::NestedCallRejected;
    return ErrorKind::BadArguments;
}

ToolOutcome ToolOutcome::success(json payload) {
    ToolOutcome out;
    out.ok = true;
    out.payload = std::move(payload);
    return out;
}

ToolOutcome ToolOutcome::failure(ErrorKind kind, const std::string& detail) {
    ToolOutcome out;
    out.ok = false;
    out.kind = kind;
    out.message = error_kind_name(kind) + ": " + detail;
    if (out.message.size() > 400) out.message = out.message.substr(0, 400);
    return out;
}

std::string ToolOutcome::rendered() const { return ok ? payload.dump() : message; }

json ToolSpec::wire_schema() const {
    json properties = json::object();
    json required = json::array();
    for (const auto& p : params) {
        json prop = json::object();
        if (p.type == "array") prop["type"] = "array";
        else if (p.type == "integer") prop["type"] = "integer";
        else if (p.type == "number") prop["type"] = "number";
        else if (p.type == "string") prop["type"] = "string";
        // "any" carries no type constraint
        prop["description"] = p.description;
        properties[p.name] = prop;
        required.push_back(p.name);
    }
    return json{{"type", "function"},
                {"function",
                 {{"name", name},
                  {"description", description},
                  {"parameters",
                   {{"type", "object"}, {"properties", properties}, {"required", required}}}}}};
}

std::string ToolSpec::signature_line() const {
    std::string line = name + ": " + description;
    if (!params.empty()) {
        line += " Arguments: ";
        for (std::size_t i = 0; i < params.size(); ++i) {
            if (i) line += "; ";
            line += params[i].name + ": " + params[i].description;
        }
    }
    return line;
}

const std::vector<ToolSpec>& all_tool_specs() {
    static const std::vector<ToolSpec> specs = {
        // data retrieval
        {"search_for_indicator_names",
         "Retrieve indicator names and descriptions that match the given keywords.",
         {{"keywords", "array", "A list of keywords or a string to search for."}},
         ToolGroup::Retrieval},
        {"get_country_code_from_name",
         "Get the three-letter country code from a country name.",
         {{"country_name", "string", "The name of the country to get the code for."}},
         ToolGroup::Retrieval},
        {"get_country_name_from_code",
         "Get the country name from a three-letter country code.",
         {{"country_code", "string", "The three-letter country code to get the name for."}},
         ToolGroup::Retrieval},
        {"get_indicator_code_from_name",
         "Get the indicator code from an indicator name.",
         {{"indicator_name", "string", "The name of the indicator to get the code for."}},
         ToolGroup::Retrieval},
        {"get_indicator_name_from_code",
         "Get the indicator name from an indicator code.",
         {{"indicator_code", "string", "The code of the indicator to get the name for."}},
         ToolGroup::Retrieval},
        {"get_country_codes_in_region",
         "Get the list of country codes in a given region.",
         {{"region", "string", "The region to get the countries for."}},
         ToolGroup::Retrieval},
        {"retrieve_value",
         "Return the value of an indicator for a country at a given year.",
         {{"country_code", "string", "The three-letter country code"},
          {"indicator_code", "string", "The indicator code"},
          {"year", "integer", "The year to look up."}},
         ToolGroup::Retrieval},
        // arithmetic
        {"add",
         "Add a list of numbers.",
         {{"values", "array", "A list of numbers to add."}},
         ToolGroup::Arithmetic},
        {"subtract",
         "Subtract value_b from value_a.",
         {{"value_a", "number", "The first number"}, {"value_b", "number", "The second number."}},
         ToolGroup::Arithmetic},
        {"greater_than",
         "Check if value_a is greater than value_b.",
         {{"value_a", "number", "The first number"}, {"value_b", "number", "The second number."}},
         ToolGroup::Arithmetic},
        {"less_than",
         "Check if value_a is less than value_b.",
         {{"value_a", "number", "The first number"}, {"value_b", "number", "The second number."}},
         ToolGroup::Arithmetic},
        {"multiply",
         "Multiply a list of numbers.",
         {{"values", "array", "A list of numbers to multiply."}},
         ToolGroup::Arithmetic},
        {"divide",
         "Divide two numbers.",
         {{"value_a", "number", "The first number"}, {"value_b", "number", "The second number."}},
         ToolGroup::Arithmetic},
        {"mean",
         "Calculate the mean of a list of numbers.",
         {{"values", "array", "A list of numbers to calculate the mean for."}},
         ToolGroup::Arithmetic},
        {"maximum",
         "Return the maximum of a list of numbers.",
         {{"values", "array", "A list of numbers."}},
         ToolGroup::Arithmetic},
        {"minimum",
         "Return the minimum of a list of numbers.",
         {{"values", "array", "A list of numbers."}},
         ToolGroup::Arithmetic},
        {"count",
         "Count the number of non-None elements in a list.",
         {{"values", "array", "A list of values to count."}},
         ToolGroup::Arithmetic},
        {"rank",
         "Return the 1-based rank of query_value in values sorted descending.",
         {{"values", "array", "A list of numbers"},
          {"query_value", "number", "The value whose rank is to be determined."}},
         ToolGroup::Arithmetic},
        {"sort",
         "Sort a list of numbers.",
         {{"values", "array", "The list of numbers to sort."}},
         ToolGroup::Arithmetic},
        {"index",
         "Return the 0-based index of query_value in values.",
         {{"values", "array", "List of values"},
          {"query_value", "any", "The value to find the index for."}},
         ToolGroup::Arithmetic},
        // utility
        {"think",
         "Record a thought or plan for the next step.",
         {{"thought", "string", "A string describing your plan or reasoning."}},
         ToolGroup::Utility},
        {"final_answer",
         "Submit your final answer.",
         {{"answer", "any", "The answer to the question."}},
         ToolGroup::Utility},
    };
    return specs;
}

const ToolSpec* tool_spec(const std::string& name) {
    for (const auto& spec : all_tool_specs())
        if (spec.name == name) return &spec;
    return nullptr;
}

std::vector<ToolSpec> schema(ToolMode mode) {
    std::vector<ToolSpec> out;
    for (const auto& spec : all_tool_specs())
        if (mode == ToolMode::All || spec.group != ToolGroup::Arithmetic) out.push_back(spec);
    return out;
}

bool tool_in_mode(const std::string& name, ToolMode mode) {
    const ToolSpec* spec = tool_spec(name);
    if (!spec) return false;
    return mode == ToolMode::All || spec->group != ToolGroup::Arithmetic;
}

// --- argument helpers ---

namespace {

std::string clip(const std::string& s, std::size_t n = 80) {
    return s.size() <= n ? s : s.substr(0, n) + "...";
}

bool contains_nested_call(const json& v) {
    if (v.is_object()) {
        if (v.contains("name") && v["name"].is_string() &&
            (v.contains("args") || v.contains("arguments")))
            return true;
        for (const auto& [key, child] : v.items()) {
            (void)key;
            if (contains_nested_call(child)) return true;
        }
        return false;
    }
    if (v.is_array()) {
        for (const auto& child : v)
            if (contains_nested_call(child)) return true;
    }
    return false;
}

struct ArgError {
    ErrorKind kind;
    std::string detail;
};

using ArgResult = std::optional<ArgError>;

ArgResult want_number(const json& args, const std::string& name, double& out) {
    if (!coerce_number(args.at(name), out))
        return ArgError{ErrorKind::BadArguments,
                        "argument '" + name + "' must be a number, got " + clip(args.at(name).dump())};
    return std::nullopt;
}

// numeric list; nulls are rejected unless allow_null, in which case they are
// returned as NaN placeholders for the caller to skip
ArgResult want_number_list(const json& args, const std::string& name, bool allow_null,
                           std::vector<double>& out, std::size_t* null_count = nullptr) {
    const json& v = args.at(name);
    if (!v.is_array())
        return ArgError{ErrorKind::BadArguments,
                        "argument '" + name + "' must be a list, got " + clip(v.dump())};
    out.clear();
    if (null_count) *null_count = 0;
    for (const auto& elem : v) {
        if (elem.is_null()) {
            if (!allow_null)
                return ArgError{ErrorKind::BadArguments,
                                "argument '" + name + "' contains a null element"};
            if (null_count) ++*null_count;
            continue;
        }
        double d = 0;
        if (!coerce_number(elem, d))
            return ArgError{ErrorKind::BadArguments, "argument '" + name +
                                                         "' contains a non-numeric element: " +
                                                         clip(elem.dump())};
        out.push_back(d);
    }
    return std::nullopt;
}

struct SearchRow {
    const IndicatorMeta* indicator;
    std::string display;
    std::size_t catalogue_idx;
    std::size_t row_idx;
    std::size_t score = 0;
};

ToolOutcome run_search(const json& args, const DataContext& ctx) {
    const json& kw = args.at("keywords");
    std::vector<std::string> keywords;
    auto add_keyword = [&](const std::string& s) {
        for (const auto& tok : tokenize(s)) keywords.push_back(tok);
    };
    if (kw.is_string()) {
        add_keyword(kw.get<std::string>());
    } else if (kw.is_array()) {
        for (const auto& elem : kw) {
            if (elem.is_string()) add_keyword(elem.get<std::string>());
            else if (elem.is_number()) add_keyword(elem.dump());
            else
                return ToolOutcome::failure(ErrorKind::BadArguments,
                                            "argument 'keywords' must contain strings, got " +
                                                clip(elem.dump()));
        }
    } else {
        return ToolOutcome::failure(ErrorKind::BadArguments,
                                    "argument 'keywords' must be a list of strings or a string, got " +
                                        clip(kw.dump()));
    }
    std::sort(keywords.begin(), keywords.end());
    keywords.erase(std::unique(keywords.begin(), keywords.end()), keywords.end());
    if (keywords.empty())
        return ToolOutcome::failure(ErrorKind::BadArguments, "argument 'keywords' is empty");

    std::vector<SearchRow> rows;
    for (std::size_t i = 0; i < ctx.catalogue.size(); ++i) {
        const auto& ind = ctx.catalogue[i];
        const auto displays = ind.display_names();
        std::set<std::string> desc_tokens;
        for (const auto& tok : tokenize(ind.description)) desc_tokens.insert(tok);
        for (std::size_t r = 0; r < displays.size(); ++r) {
            std::set<std::string> tokens = desc_tokens;
            for (const auto& tok : tokenize(displays[r])) tokens.insert(tok);
            std::size_t score = 0;
            for (const auto& k : keywords)
                if (tokens.count(k)) ++score;
            if (score > 0) rows.push_back({&ind, displays[r], i, r, score});
        }
    }
    std::stable_sort(rows.begin(), rows.end(), [](const SearchRow& a, const SearchRow& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.catalogue_idx != b.catalogue_idx) return a.catalogue_idx < b.catalogue_idx;
        return a.row_idx < b.row_idx;
    });
    json out = json::array();
    for (std::size_t i = 0; i < rows.size() && i < static_cast<std::size_t>(kSearchResultCap); ++i)
        out.push_back(json{{"name", rows[i].display}, {"description", rows[i].indicator->description}});
    return ToolOutcome::success(out);
}

ToolOutcome dispatch(const ToolSpec& spec, const json& args, const DataContext& ctx) {
    const std::string& name = spec.name;

    if (name == "search_for_indicator_names") return run_search(args, ctx);

    if (name == "get_country_code_from_name") {
        const json& v = args.at("country_name");
        if (!v.is_string())
            return ToolOutcome::failure(ErrorKind::BadArguments,
                                        "argument 'country_name' must be a string, got " + clip(v.dump()));
        const std::string query = v.get<std::string>();
        if (const CountryMeta* c = ctx.country_by_name(query)) return ToolOutcome::success(json(c->code));
        // nearest-match suggestions by edit distance
        std::vector<std::pair<std::size_t, std::string>> ranked;
        for (const auto& c : ctx.countries)
            ranked.emplace_back(edit_distance(fold(query), fold(c.name)), c.name);
        std::stable_sort(ranked.begin(), ranked.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        std::string detail = "no country named '" + clip(query) + "'";
        if (!ranked.empty()) {
            detail += "; close matches:";
            for (std::size_t i = 0; i < ranked.size() && i < 3; ++i)
                detail += (i ? ", " : " ") + ranked[i].second;
        }
        return ToolOutcome::failure(ErrorKind::NotFound, detail);
    }

    if (name == "get_country_name_from_code") {
        const json& v = args.at("country_code");
        if (!v.is_string())
            return ToolOutcome::failure(ErrorKind::BadArguments,
                                        "argument 'country_code' must be a string, got " + clip(v.dump()));
        if (const CountryMeta* c = ctx.country_by_code(v.get<std::string>()))
            return ToolOutcome::success(json(c->name));
        return ToolOutcome::failure(ErrorKind::NotFound,
                                    "no country with code '" + clip(v.get<std::string>()) + "'");
    }

    if (name == "get_indicator_code_from_name") {
        const json& v = args.at("indicator_name");
        if (!v.is_string())
            return ToolOutcome::failure(ErrorKind::BadArguments,
                                        "argument 'indicator_name' must be a string, got " + clip(v.dump()));
        if (const IndicatorMeta* ind = ctx.indicator_by_name(v.get<std::string>()))
            return ToolOutcome::success(json(ind->code));
        return ToolOutcome::failure(ErrorKind::NotFound,
                                    "no indicator named '" + clip(v.get<std::string>()) +
                                        "'; try search_for_indicator_names");
    }

    if (name == "get_indicator_name_from_code") {
        const json& v = args.at("indicator_code");
        if (!v.is_string())
            return ToolOutcome::failure(ErrorKind::BadArguments,
                                        "argument 'indicator_code' must be a string, got " + clip(v.dump()));
        if (const IndicatorMeta* ind = ctx.indicator_by_code(v.get<std::string>()))
            return ToolOutcome::success(json(ind->name));
        return ToolOutcome::failure(ErrorKind::NotFound,
                                    "no indicator with code '" + clip(v.get<std::string>()) + "'");
    }

    if (name == "get_country_codes_in_region") {
        const json& v = args.at("region");
        if (!v.is_string())
            return ToolOutcome::failure(ErrorKind::BadArguments,
                                        "argument 'region' must be a string, got " + clip(v.dump()));
        if (const RegionMeta* r = ctx.region_by_name(v.get<std::string>())) {
            json out = json::array();
            for (const auto& code : r->countries) out.push_back(code);
            return ToolOutcome::success(out);
        }
        return ToolOutcome::failure(ErrorKind::NotFound,
                                    "no region named '" + clip(v.get<std::string>()) + "'");
    }

    if (name == "retrieve_value") {
        const json& cc = args.at("country_code");
        const json& ic = args.at("indicator_code");
        if (!cc.is_string())
            return ToolOutcome::failure(ErrorKind::BadArguments,
                                        "argument 'country_code' must be a string, got " + clip(cc.dump()));
        if (!ic.is_string())
            return ToolOutcome::failure(ErrorKind::BadArguments,
                                        "argument 'indicator_code' must be a string, got " + clip(ic.dump()));
        double yeard = 0;
        if (!coerce_number(args.at("year"), yeard) || std::floor(yeard) != yeard)
            return ToolOutcome::failure(ErrorKind::BadArguments,
                                        "argument 'year' must be an integer, got " +
                                            clip(args.at("year").dump()));
        const int year = static_cast<int>(yeard);
        LookupResult r = ctx.lookup_value(cc.get<std::string>(), ic.get<std::string>(), year);
        switch (r.status) {
            case LookupStatus::UnknownIndicator:
                return ToolOutcome::failure(ErrorKind::NotFound,
                                            "no indicator with code '" + clip(ic.get<std::string>()) + "'");
            case LookupStatus::UnknownCountry:
                return ToolOutcome::failure(ErrorKind::NotFound,
                                            "no country with code '" + clip(cc.get<std::string>()) + "'");
            case LookupStatus::Missing:
                return ToolOutcome::failure(ErrorKind::NoData,
                                            "no data for " + cc.get<std::string>() + "/" +
                                                ic.get<std::string>() + " in " + std::to_string(year));
            case LookupStatus::Found: return ToolOutcome::success(number_value(r.value));
        }
        return ToolOutcome::failure(ErrorKind::NoData, "lookup failed");
    }

    if (name == "add" || name == "multiply") {
        std::vector<double> values;
        if (auto err = want_number_list(args, "values", false, values))
            return ToolOutcome::failure(err->kind, err->detail);
        if (values.empty())
            return ToolOutcome::failure(ErrorKind::ArithmeticError,
                                        name + " requires a non-empty list of values");
        double acc = name == "add" ? 0.0 : 1.0;
        for (double v : values) acc = name == "add" ? acc + v : acc * v;
        return ToolOutcome::success(number_value(acc));
    }

    if (name == "subtract" || name == "divide" || name == "greater_than" || name == "less_than") {
        double a = 0, b = 0;
        if (auto err = want_number(args, "value_a", a)) return ToolOutcome::failure(err->kind, err->detail);
        if (auto err = want_number(args, "value_b", b)) return ToolOutcome::failure(err->kind, err->detail);
        if (name == "subtract") return ToolOutcome::success(number_value(a - b));
        if (name == "greater_than") return ToolOutcome::success(json(a > b));
        if (name == "less_than") return ToolOutcome::success(json(a < b));
        if (b == 0.0)
            return ToolOutcome::failure(ErrorKind::ArithmeticError,
                                        "division by zero (value_b is 0)");
        return ToolOutcome::success(number_value(a / b));
    }

    if (name == "mean") {
        std::vector<double> values;
        std::size_t nulls = 0;
        if (auto err = want_number_list(args, "values", true, values, &nulls))
            return ToolOutcome::failure(err->kind, err->detail);
        if (values.empty())
            return ToolOutcome::failure(ErrorKind::ArithmeticError,
                                        "mean requires at least one non-null value");
        double sum = 0;
        for (double v : values) sum += v;
        return ToolOutcome::success(number_value(sum / static_cast<double>(values.size())));
    }

    if (name == "maximum" || name == "minimum") {
        std::vector<double> values;
        if (auto err = want_number_list(args, "values", false, values))
            return ToolOutcome::failure(err->kind, err->detail);
        if (values.empty())
            return ToolOutcome::failure(ErrorKind::ArithmeticError,
                                        name + " requires a non-empty list of values");
        double best = values[0];
        for (double v : values) best = name == "maximum" ? std::max(best, v) : std::min(best, v);
        return ToolOutcome::success(number_value(best));
    }

    if (name == "count") {
        const json& v = args.at("values");
        if (!v.is_array())
            return ToolOutcome::failure(ErrorKind::BadArguments,
                                        "argument 'values' must be a list, got " + clip(v.dump()));
        std::int64_t n = 0;
        for (const auto& elem : v)
            if (!elem.is_null()) ++n;
        return ToolOutcome::success(json(n));
    }

    if (name == "rank") {
        std::vector<double> values;
        if (auto err = want_number_list(args, "values", false, values))
            return ToolOutcome::failure(err->kind, err->detail);
        double q = 0;
        if (auto err = want_number(args, "query_value", q)) return ToolOutcome::failure(err->kind, err->detail);
        bool present = false;
        std::int64_t greater = 0;
        for (double v : values) {
            if (approx_eq(v, q, 1e-9, 1e-12)) present = true;
            else if (v > q) ++greater;
        }
        if (!present)
            return ToolOutcome::failure(ErrorKind::NotFound,
                                        "query_value " + render_number(q) + " is not in values");
        return ToolOutcome::success(json(1 + greater));
    }

    if (name == "sort") {
        std::vector<double> values;
        if (auto err = want_number_list(args, "values", false, values))
            return ToolOutcome::failure(err->kind, err->detail);
        std::sort(values.begin(), values.end());
        json out = json::array();
        for (double v : values) out.push_back(number_value(v));
        return ToolOutcome::success(out);
    }

    if (name == "index") {
        const json& v = args.at("values");
        if (!v.is_array())
            return ToolOutcome::failure(ErrorKind::BadArguments,
                                        "argument 'values' must be a list, got " + clip(v.dump()));
        const json& q = args.at("query_value");
        for (std::size_t i = 0; i < v.size(); ++i)
            if (semantic_eq(v[i], q)) return ToolOutcome::success(json(static_cast<std::int64_t>(i)));
        return ToolOutcome::failure(ErrorKind::NotFound,
                                    "query_value " + clip(q.dump()) + " is not in values");
    }

    if (name == "think") return ToolOutcome::success(json("ok"));

    if (name == "final_answer")
        return ToolOutcome::success(args.contains("answer") ? args.at("answer") : json(nullptr));

    return ToolOutcome::failure(ErrorKind::UnknownTool, "no tool named '" + clip(name) + "'");
}

}  // namespace

ToolOutcome execute(const ToolCall& call, const DataContext& ctx, ToolMode mode) {
    try {
        const ToolSpec* spec = tool_spec(call.name);
        if (!spec || !tool_in_mode(call.name, mode))
            return ToolOutcome::failure(ErrorKind::UnknownTool,
                                        "no tool named '" + clip(call.name) + "'");

        // utility tools acknowledge anything
        if (spec->name == "think") return ToolOutcome::success(json("ok"));
        if (spec->name == "final_answer")
            return ToolOutcome::success(call.args.is_object() && call.args.contains("answer")
                                            ? call.args.at("answer")
                                            : json(nullptr));

        if (!call.args.is_object())
            return ToolOutcome::failure(ErrorKind::BadArguments,
                                        "arguments must be an object mapping, got " +
                                            clip(call.args.dump()));
        if (contains_nested_call(call.args))
            return ToolOutcome::failure(ErrorKind::NestedCallRejected,
                                        "arguments to '" + spec->name +
                                            "' contain a tool call; execute each call separately");
        for (const auto& [key, value] : call.args.items()) {
            (void)value;
            bool known = false;
            for (const auto& p : spec->params)
                if (p.name == key) known = true;
            if (!known)
                return ToolOutcome::failure(ErrorKind::BadArguments, "unexpected argument '" + clip(key) +
                                                                         "' for tool '" + spec->name + "'");
        }
        for (const auto& p : spec->params)
            if (!call.args.contains(p.name))
                return ToolOutcome::failure(ErrorKind::BadArguments,
                                            "missing argument '" + p.name + "' for tool '" + spec->name + "'");

        return dispatch(*spec, call.args, ctx);
    } catch (const std::exception& e) {
        // the dispatcher is total: anything unexpected becomes a typed error
        return ToolOutcome::failure(ErrorKind::BadArguments, std::string("invalid arguments: ") + e.what());
    }
}

}  // namespace wbqa
