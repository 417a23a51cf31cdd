#include "wbqa/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

namespace wbqa {

namespace {

struct PlanCut {
    PlanOutcome outcome;
    std::string note;
};

const std::set<std::string>& stopwords() {
    static const std::set<std::string> words = {"of", "the", "in",  "a",  "an", "and", "for",
                                                "to", "per", "as",  "at", "on", "by",  "with"};
    return words;
}

// values within the tool tolerance are treated as equal on both oracle routes
bool close(double a, double b) { return approx_eq(a, b, 1e-9, 1e-12); }

class PlanExec {
public:
    PlanExec(const json& slots, const DataContext& ctx) : slots_(slots), ctx_(ctx) {}

    const json& slot(const std::string& key) const {
        if (!slots_.contains(key)) throw PlanCut{PlanOutcome::Invalid, "missing slot " + key};
        return slots_.at(key);
    }
    std::string str(const std::string& key) const { return slot(key).get<std::string>(); }
    int year(const std::string& key) const { return slot(key).get<int>(); }
    bool highest() const { return str("operator") == "highest"; }

    // execute through the registry and record the essential pattern
    json call(const std::string& tool, json args, MatchRule rule,
              std::vector<std::string> accept_names = {}) {
        ToolCall tc{"", tool, args};
        ToolOutcome out = execute(tc, ctx_, ToolMode::All);
        if (!out.ok) throw PlanCut{PlanOutcome::Invalid, "plan step " + tool + " failed: " + out.message};
        ActionPattern pattern{tool, std::move(args), rule, std::move(accept_names)};
        essential.add(std::move(pattern));
        return out.payload;
    }
    json call(const std::string& tool, json args) {
        static const std::set<std::string> list_tools = {"add",  "multiply", "mean",  "maximum", "minimum",
                                                         "count", "rank",     "sort",  "index"};
        return call(tool, std::move(args), list_tools.count(tool) ? MatchRule::Multiset : MatchRule::Exact);
    }

    // search for the property, then resolve its code; the canonical first two
    // steps of every plan
    void search_and_code() {
        const std::string display = str("property");
        const std::string expected = str("property_code");
        const IndicatorMeta* ind = ctx_.indicator_by_code(expected);
        if (!ind) throw PlanCut{PlanOutcome::Invalid, "unknown indicator code " + expected};
        std::vector<std::string> accept = ind->display_names();

        std::vector<std::string> keywords;
        for (const auto& tok : tokenize(display))
            if (!stopwords().count(tok)) keywords.push_back(tok);
        if (keywords.empty()) keywords = tokenize(display);

        json payload = call("search_for_indicator_names", json{{"keywords", keywords}},
                            MatchRule::SearchResult, accept);
        bool surfaced = false;
        for (const auto& row : payload) {
            if (!row.contains("name")) continue;
            const std::string name = fold(row["name"].get<std::string>());
            for (const auto& a : accept)
                if (fold(a) == name) surfaced = true;
        }
        if (!surfaced)
            throw PlanCut{PlanOutcome::Invalid, "search cannot surface indicator " + expected};

        json code = call("get_indicator_code_from_name", json{{"indicator_name", display}},
                         MatchRule::IndicatorName, accept);
        if (code.get<std::string>() != expected)
            throw PlanCut{PlanOutcome::Invalid, "display name '" + display + "' resolves elsewhere"};
        icode_ = expected;
    }

    std::string country_code(const std::string& subject_key) {
        json code = call("get_country_code_from_name", json{{"country_name", str(subject_key)}});
        return code.get<std::string>();
    }

    std::string country_name(const std::string& code) {
        return call("get_country_name_from_code", json{{"country_code", code}}).get<std::string>();
    }

    std::vector<std::string> region_codes(const std::string& region_key) {
        json payload = call("get_country_codes_in_region", json{{"region", str(region_key)}});
        std::vector<std::string> codes = payload.get<std::vector<std::string>>();
        if (codes.empty()) throw PlanCut{PlanOutcome::Invalid, "empty region " + str(region_key)};
        return codes;
    }

    // point retrieval; missing data either aborts (critical) or flags the
    // partial gap and is skipped by the caller
    double retrieve(const std::string& code, int yr, bool critical) {
        LookupResult r = ctx_.lookup_value(code, icode_, yr);
        if (r.status == LookupStatus::Found) {
            call("retrieve_value",
                 json{{"country_code", code}, {"indicator_code", icode_}, {"year", yr}});
            return r.value;
        }
        if (r.status == LookupStatus::Missing) {
            if (critical)
                throw PlanCut{PlanOutcome::Unanswerable,
                              "missing " + code + "/" + icode_ + " at " + std::to_string(yr)};
            partial_gap = true;
            return std::numeric_limits<double>::quiet_NaN();
        }
        throw PlanCut{PlanOutcome::Invalid, "unknown code in plan: " + code};
    }

    // region sweep in sorted-code order; skips missing members when tolerant
    std::vector<double> sweep(const std::vector<std::string>& codes, int yr, bool critical) {
        std::vector<double> out;
        for (const auto& code : codes) {
            double v = retrieve(code, yr, critical);
            if (!std::isnan(v)) out.push_back(v);
        }
        if (out.empty()) throw PlanCut{PlanOutcome::Unanswerable, "no data across region sweep"};
        return out;
    }

    static json values_arg(const std::vector<double>& values) {
        json arr = json::array();
        for (double v : values) arr.push_back(number_value(v));
        return arr;
    }

    double add(const std::vector<double>& values) {
        return call("add", json{{"values", values_arg(values)}}).get<double>();
    }
    double mean(const std::vector<double>& values) {
        return call("mean", json{{"values", values_arg(values)}}).get<double>();
    }
    double maximum(const std::vector<double>& values) {
        return call("maximum", json{{"values", values_arg(values)}}).get<double>();
    }
    double minimum(const std::vector<double>& values) {
        return call("minimum", json{{"values", values_arg(values)}}).get<double>();
    }
    double subtract(double a, double b) {
        return call("subtract", json{{"value_a", number_value(a)}, {"value_b", number_value(b)}})
            .get<double>();
    }
    double divide(double a, double b) {
        if (b == 0.0) throw PlanCut{PlanOutcome::Invalid, "zero denominator"};
        return call("divide", json{{"value_a", number_value(a)}, {"value_b", number_value(b)}})
            .get<double>();
    }
    bool gt(double a, double b) {
        return call("greater_than", json{{"value_a", number_value(a)}, {"value_b", number_value(b)}})
            .get<bool>();
    }
    std::int64_t rank_of(const std::vector<double>& values, double q) {
        return call("rank", json{{"values", values_arg(values)}, {"query_value", number_value(q)}})
            .get<std::int64_t>();
    }
    std::vector<double> sort_values(const std::vector<double>& values) {
        return call("sort", json{{"values", values_arg(values)}}).get<std::vector<double>>();
    }
    std::int64_t index_of(const std::vector<double>& values, double q) {
        return call("index", json{{"values", values_arg(values)}, {"query_value", number_value(q)}})
            .get<std::int64_t>();
    }

    static std::size_t pos_of(const std::vector<std::string>& codes, const std::string& code) {
        for (std::size_t i = 0; i < codes.size(); ++i)
            if (codes[i] == code) return i;
        throw PlanCut{PlanOutcome::Invalid, "subject " + code + " not in region"};
    }

    bool partial_gap = false;
    EssentialActionSet essential;

private:
    const json& slots_;
    const DataContext& ctx_;
    std::string icode_;
};

PlanResult finish(PlanExec& px, json answer) {
    if (px.partial_gap)
        return {PlanOutcome::Partial, json(), {}, "aggregate sweep lost members"};
    return {PlanOutcome::Answerable, std::move(answer), std::move(px.essential), ""};
}

bool has_near_duplicates(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    for (std::size_t i = 1; i < values.size(); ++i)
        if (close(values[i - 1], values[i])) return true;
    return false;
}

// --- the twenty plans ---

PlanResult plan_average_change(const json& slots, const DataContext& ctx) {
    PlanExec px(slots, ctx);
    px.search_and_code();
    const std::string c = px.country_code("subject");
    const int ya = px.year("year_a"), yb = px.year("year_b");
    std::map<int, double> vals;
    for (int y = ya; y <= yb; ++y) {
        double v = px.retrieve(c, y, y == ya || y == yb);
        if (!std::isnan(v)) vals[y] = v;
    }
    std::vector<double> diffs;
    for (int y = ya; y < yb; ++y)
        if (vals.count(y) && vals.count(y + 1)) diffs.push_back(px.subtract(vals[y + 1], vals[y]));
    if (diffs.empty()) throw PlanCut{PlanOutcome::Unanswerable, "no computable yearly changes"};
    return finish(px, number_value(px.mean(diffs)));
}

PlanResult plan_average_property(const json& slots, const DataContext& ctx) {
    PlanExec px(slots, ctx);
    px.search_and_code();
    auto codes = px.region_codes("region");
    auto vals = px.sweep(codes, px.year("year"), false);
    return finish(px, number_value(px.mean(vals)));
}

PlanResult plan_average_property_comparison(const json& slots, const DataContext& ctx) {
    PlanExec px(slots, ctx);
    px.search_and_code();
    auto codes = px.region_codes("region");
    const std::string sc = px.country_code("subject");
    double vs = px.retrieve(sc, px.year("year"), true);
    auto vals = px.sweep(codes, px.year("year"), false);
    double m = px.mean(vals);
    bool ans = px.highest() ? px.gt(vs, m) : px.gt(m, vs);
    return finish(px, json(ans));
}

PlanResult plan_country_property_comparison(const json& slots, const DataContext& ctx) {
    PlanExec px(slots, ctx);
    px.search_and_code();
    const std::string ca = px.country_code("subject_a");
    const std::string cb = px.country_code("subject_b");
    double va = px.retrieve(ca, px.year("year_a"), true);
    double vb = px.retrieve(cb, px.year("year_b"), true);
    bool ans = px.highest() ? px.gt(va, vb) : px.gt(vb, va);
    return finish(px, json(ans));
}

PlanResult plan_country_threshold_count(const json& slots, const DataContext& ctx) {
    PlanExec px(slots, ctx);
    px.search_and_code();
    const std::string sc = px.country_code("subject");
    auto codes = px.region_codes("region");
    const int yr = px.year("year");
    double vs = px.retrieve(sc, yr, true);
    auto vals = px.sweep(codes, yr, true);
    bool member = std::find(codes.begin(), codes.end(), sc) != codes.end();
    std::vector<double> pool = vals;
    if (!member) pool.push_back(vs);
    std::int64_t count;
    if (px.highest()) {
        std::int64_t r = px.rank_of(pool, vs);
        count = static_cast<std::int64_t>(px.subtract(static_cast<double>(r), 1.0));
    } else {
        auto sorted = px.sort_values(pool);
        count = px.index_of(sorted, vs);
    }
    return finish(px, json(count));
}

PlanResult plan_property_of_subject(const json& slots, const DataContext& ctx) {
    PlanExec px(slots, ctx);
    px.search_and_code();
    const std::string c = px.country_code("subject");
    double v = px.retrieve(c, px.year("year"), true);
    return finish(px, number_value(v));
}

PlanResult plan_property_ratio_comparison(const json& slots, const DataContext& ctx) {
    PlanExec px(slots, ctx);
    px.search_and_code();
    const std::string ca = px.country_code("subject_a");
    const std::string cb = px.country_code("subject_b");
    double va = px.retrieve(ca, px.year("year"), true);
    double vb = px.retrieve(cb, px.year("year"), true);
    double ratio = px.divide(va, vb);
    double threshold = px.slot("threshold").get<double>();
    bool ans = px.highest() ? px.gt(ratio, threshold) : px.gt(threshold, ratio);
    return finish(px, json(ans));
}

PlanResult plan_rank_change(const json& slots, const DataContext& ctx) {
    PlanExec px(slots, ctx);
    px.search_and_code();
    const std::string sc = px.country_code("subject");
    auto codes = px.region_codes("region");
    const std::size_t pos = PlanExec::pos_of(codes, sc);
    auto vals_a = px.sweep(codes, px.year("year_a"), true);
    auto vals_b = px.sweep(codes, px.year("year_b"), true);
    std::int64_t ra = px.rank_of(vals_a, vals_a[pos]);
    std::int64_t rb = px.rank_of(vals_b, vals_b[pos]);
    // no equality tool exists, so the final inequality is a pure binding
    return finish(px, json(ra != rb));
}

PlanResult plan_region_average_comparison(const json& slots, const DataContext& ctx) {
    PlanExec px(slots, ctx);
    px.search_and_code();
    auto codes_a = px.region_codes("region_a");
    auto codes_b = px.region_codes("region_b");
    const int yr = px.year("year");
    auto vals_a = px.sweep(codes_a, yr, false);
    auto vals_b = px.sweep(codes_b, yr, false);
    double ma = px.mean(vals_a), mb = px.mean(vals_b);
    bool ans = px.highest() ? px.gt(ma, mb) : px.gt(mb, ma);
    return finish(px, json(ans));
}

PlanResult plan_region_comparison(const json& slots, const DataContext& ctx) {
    PlanExec px(slots, ctx);
    px.search_and_code();
    auto codes = px.region_codes("region");
    auto vals = px.sweep(codes, px.year("year"), true);
    double best = px.highest() ? px.maximum(vals) : px.minimum(vals);
    std::int64_t pos = px.index_of(vals, best);
    return finish(px, json(px.country_name(codes[static_cast<std::size_t>(pos)])));
}

PlanResult plan_region_comparison_result(const json& slots, const DataContext& ctx) {
    PlanExec px(slots, ctx);
    px.search_and_code();
    auto codes = px.region_codes("region");
    auto vals = px.sweep(codes, px.year("year_2"), true);
    double best = px.highest() ? px.maximum(vals) : px.minimum(vals);
    std::int64_t pos = px.index_of(vals, best);
    double v1 = px.retrieve(codes[static_cast<std::size_t>(pos)], px.year("year_1"), true);
    return finish(px, number_value(v1));
}

PlanResult plan_region_property_change(const json& slots, const DataContext& ctx) {
    PlanExec px(slots, ctx);
    px.search_and_code();
    auto codes = px.region_codes("region");
    auto vals_a = px.sweep(codes, px.year("year_a"), true);
    auto vals_b = px.sweep(codes, px.year("year_b"), true);
    std::vector<double> diffs;
    for (std::size_t i = 0; i < codes.size(); ++i) diffs.push_back(px.subtract(vals_b[i], vals_a[i]));
    double best = px.highest() ? px.maximum(diffs) : px.minimum(diffs);
    std::int64_t pos = px.index_of(diffs, best);
    return finish(px, json(px.country_name(codes[static_cast<std::size_t>(pos)])));
}

PlanResult plan_region_property_ratio(const json& slots, const DataContext& ctx) {
    PlanExec px(slots, ctx);
    px.search_and_code();
    auto codes = px.region_codes("region");
    auto vals = px.sweep(codes, px.year("year"), true);
    double mx = px.maximum(vals);
    double mn = px.minimum(vals);
    return finish(px, number_value(px.divide(mx, mn)));
}

PlanResult plan_region_proportion(const json& slots, const DataContext& ctx) {
    PlanExec px(slots, ctx);
    px.search_and_code();
    auto codes = px.region_codes("region");
    const std::string sc = px.country_code("subject");
    PlanExec::pos_of(codes, sc);  // subject must belong to the region
    const int yr = px.year("year");
    double vs = px.retrieve(sc, yr, true);
    auto vals = px.sweep(codes, yr, false);
    double total = px.add(vals);
    if (total == 0.0) throw PlanCut{PlanOutcome::Invalid, "zero region total"};
    return finish(px, number_value(px.divide(vs, total)));
}

PlanResult plan_region_proportion_change(const json& slots, const DataContext& ctx) {
    PlanExec px(slots, ctx);
    px.search_and_code();
    auto codes = px.region_codes("region");
    const std::string sc = px.country_code("subject");
    PlanExec::pos_of(codes, sc);
    auto share_at = [&](int yr) {
        double vs = px.retrieve(sc, yr, true);
        auto vals = px.sweep(codes, yr, false);
        double total = px.add(vals);
        if (total == 0.0) throw PlanCut{PlanOutcome::Invalid, "zero region total"};
        return px.divide(vs, total);
    };
    double sa = share_at(px.year("year_a"));
    double sb = share_at(px.year("year_b"));
    bool ans = px.highest() ? px.gt(sa, sb) : px.gt(sb, sa);
    return finish(px, json(ans));
}

PlanResult plan_region_range_comparison(const json& slots, const DataContext& ctx) {
    PlanExec px(slots, ctx);
    px.search_and_code();
    const int yr = px.year("year");
    auto range_of = [&](const std::string& key) {
        auto codes = px.region_codes(key);
        auto vals = px.sweep(codes, yr, true);
        return px.subtract(px.maximum(vals), px.minimum(vals));
    };
    double ra = range_of("region_a");
    double rb = range_of("region_b");
    bool ans = px.highest() ? px.gt(ra, rb) : px.gt(rb, ra);
    return finish(px, json(ans));
}

PlanResult plan_subject_property_change(const json& slots, const DataContext& ctx) {
    PlanExec px(slots, ctx);
    px.search_and_code();
    const std::string c = px.country_code("subject");
    double va = px.retrieve(c, px.year("year_a"), true);
    double vb = px.retrieve(c, px.year("year_b"), true);
    double d = px.subtract(vb, va);
    // "higher" asks whether the change was positive, "lower" whether negative
    bool ans = px.highest() ? px.gt(d, 0.0) : px.gt(0.0, d);
    return finish(px, json(ans));
}

PlanResult plan_subject_property_rank(const json& slots, const DataContext& ctx) {
    PlanExec px(slots, ctx);
    px.search_and_code();
    const std::string sc = px.country_code("subject");
    auto codes = px.region_codes("region");
    const std::size_t pos = PlanExec::pos_of(codes, sc);
    auto vals = px.sweep(codes, px.year("year"), true);
    return finish(px, json(px.rank_of(vals, vals[pos])));
}

PlanResult plan_top_n_total(const json& slots, const DataContext& ctx) {
    PlanExec px(slots, ctx);
    px.search_and_code();
    auto codes = px.region_codes("region");
    auto vals = px.sweep(codes, px.year("year"), true);
    if (has_near_duplicates(vals))
        throw PlanCut{PlanOutcome::Invalid, "duplicate values make top-n ambiguous"};
    const int n = px.slot("n").get<int>();
    if (static_cast<std::size_t>(n) >= vals.size())
        throw PlanCut{PlanOutcome::Invalid, "region not larger than n"};
    auto sorted = px.sort_values(vals);
    std::vector<double> selected;  // descending-value order
    if (px.highest()) {
        for (int i = 0; i < n; ++i) selected.push_back(sorted[sorted.size() - 1 - static_cast<std::size_t>(i)]);
    } else {
        for (int i = n - 1; i >= 0; --i) selected.push_back(sorted[static_cast<std::size_t>(i)]);
    }
    json names = json::array();
    for (double v : selected) {
        std::int64_t pos = px.index_of(vals, v);
        names.push_back(px.country_name(codes[static_cast<std::size_t>(pos)]));
    }
    return finish(px, names);
}

PlanResult plan_total_property(const json& slots, const DataContext& ctx) {
    PlanExec px(slots, ctx);
    px.search_and_code();
    auto codes = px.region_codes("region");
    auto vals = px.sweep(codes, px.year("year"), false);
    return finish(px, number_value(px.add(vals)));
}

const std::map<std::string, SolutionPlan>& plan_registry() {
    static const std::map<std::string, SolutionPlan> plans = [] {
        std::map<std::string, SolutionPlan> m;
        auto reg = [&](const std::string& id, std::vector<std::string> steps,
                       PlanResult (*fn)(const json&, const DataContext&)) {
            m.emplace(id, SolutionPlan{id, std::move(steps), fn});
        };
        reg("AverageChange",
            {"search property", "resolve indicator code", "resolve country code",
             "retrieve value for every year in [year_a, year_b]",
             "subtract consecutive years", "mean of the yearly changes"},
            plan_average_change);
        reg("AverageProperty",
            {"search property", "resolve indicator code", "list region countries",
             "retrieve each member value", "mean"},
            plan_average_property);
        reg("AveragePropertyComparison",
            {"search property", "resolve indicator code", "list region countries",
             "resolve subject code", "retrieve subject value", "retrieve each member value",
             "mean", "greater_than oriented by operator"},
            plan_average_property_comparison);
        reg("CountryPropertyComparison",
            {"search property", "resolve indicator code", "resolve both country codes",
             "retrieve both values", "greater_than oriented by operator"},
            plan_country_property_comparison);
        reg("CountryThresholdCount",
            {"search property", "resolve indicator code", "resolve subject code",
             "list region countries", "retrieve subject value", "retrieve each member value",
             "higher: rank then subtract 1; lower: sort then index"},
            plan_country_threshold_count);
        reg("PropertyOfSubject",
            {"search property", "resolve indicator code", "resolve country code", "retrieve value"},
            plan_property_of_subject);
        reg("PropertyRatioComparison",
            {"search property", "resolve indicator code", "resolve both country codes",
             "retrieve both values", "divide", "greater_than against the threshold"},
            plan_property_ratio_comparison);
        reg("RankChange",
            {"search property", "resolve indicator code", "resolve subject code",
             "list region countries", "retrieve every member value at both years",
             "rank at year_a and year_b", "compare ranks (binding)"},
            plan_rank_change);
        reg("RegionAverageComparison",
            {"search property", "resolve indicator code", "list both regions",
             "retrieve each member value in both", "mean each", "greater_than oriented by operator"},
            plan_region_average_comparison);
        reg("RegionComparison",
            {"search property", "resolve indicator code", "list region countries",
             "retrieve each member value", "maximum/minimum", "index of the winner",
             "country name from code"},
            plan_region_comparison);
        reg("RegionComparisonResult",
            {"search property", "resolve indicator code", "list region countries",
             "retrieve each member value at year_2", "maximum/minimum", "index of the winner",
             "retrieve the winner's value at year_1"},
            plan_region_comparison_result);
        reg("RegionPropertyChange",
            {"search property", "resolve indicator code", "list region countries",
             "retrieve every member value at both years", "subtract per country",
             "maximum/minimum of the changes", "index of the winner", "country name from code"},
            plan_region_property_change);
        reg("RegionPropertyRatio",
            {"search property", "resolve indicator code", "list region countries",
             "retrieve each member value", "maximum", "minimum", "divide max by min"},
            plan_region_property_ratio);
        reg("RegionProportion",
            {"search property", "resolve indicator code", "list region countries",
             "resolve subject code", "retrieve subject value", "retrieve each member value",
             "add", "divide subject value by the total"},
            plan_region_proportion);
        reg("RegionProportionChange",
            {"search property", "resolve indicator code", "list region countries",
             "resolve subject code", "per year: retrieve values, add, divide",
             "greater_than oriented by operator"},
            plan_region_proportion_change);
        reg("RegionRangeComparison",
            {"search property", "resolve indicator code", "list both regions",
             "retrieve each member value in both", "per region: maximum, minimum, subtract",
             "greater_than oriented by operator"},
            plan_region_range_comparison);
        reg("SubjectPropertyChange",
            {"search property", "resolve indicator code", "resolve country code",
             "retrieve value at both years", "subtract", "greater_than against zero"},
            plan_subject_property_change);
        reg("SubjectPropertyRank",
            {"search property", "resolve indicator code", "resolve subject code",
             "list region countries", "retrieve each member value", "rank the subject value"},
            plan_subject_property_rank);
        reg("TopNTotal",
            {"search property", "resolve indicator code", "list region countries",
             "retrieve each member value", "sort", "take the n highest/lowest (binding)",
             "index each selected value", "country name from each code"},
            plan_top_n_total);
        reg("TotalProperty",
            {"search property", "resolve indicator code", "list region countries",
             "retrieve each member value", "add"},
            plan_total_property);
        return m;
    }();
    return plans;
}

// --- brute force (no registry involvement) ---

double bf_value(const DataContext& ctx, const std::string& icode, const std::string& cc, int year) {
    return ctx.tables.at(icode).values.at({cc, year});
}

std::string bf_country_code(const DataContext& ctx, const std::string& name) {
    return ctx.country_by_name(name)->code;
}

std::vector<std::string> bf_region(const DataContext& ctx, const std::string& name) {
    return ctx.region_by_name(name)->countries;  // kept sorted by finalize()
}

std::vector<double> bf_sweep(const DataContext& ctx, const std::string& icode,
                             const std::vector<std::string>& codes, int year, bool skip_missing) {
    std::vector<double> out;
    const auto& table = ctx.tables.at(icode).values;
    for (const auto& code : codes) {
        auto it = table.find({code, year});
        if (it == table.end()) {
            if (skip_missing) continue;
            throw std::runtime_error("brute force: missing datum " + code);
        }
        out.push_back(it->second);
    }
    return out;
}

double bf_mean(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// first occurrence wins on ties, mirroring maximum+index through the tools
std::size_t bf_arg_best(const std::vector<double>& v, bool want_max) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (want_max ? v[i] > v[best] : v[i] < v[best]) best = i;
    for (std::size_t i = 0; i < best; ++i)
        if (close(v[i], v[best])) return i;  // tool index() matches within tolerance
    return best;
}

}  // namespace

const SolutionPlan& plan_for(const std::string& template_id) {
    const auto& plans = plan_registry();
    auto it = plans.find(template_id);
    if (it == plans.end()) throw std::runtime_error("no plan registered for template " + template_id);
    return it->second;
}

PlanResult execute_plan(const std::string& template_id, const json& slots, const DataContext& ctx) {
    const SolutionPlan& plan = plan_for(template_id);
    try {
        return plan.run(slots, ctx);
    } catch (const PlanCut& cut) {
        PlanResult out;
        out.outcome = cut.outcome;
        out.note = cut.note;
        return out;
    }
}

json brute_force_answer(const std::string& template_id, const json& slots, const DataContext& ctx) {
    const std::string ic = slots.contains("property_code") ? slots.at("property_code").get<std::string>() : "";
    auto op_is_highest = [&] { return slots.at("operator").get<std::string>() == "highest"; };

    if (template_id == "AverageChange") {
        const std::string c = bf_country_code(ctx, slots.at("subject").get<std::string>());
        const int ya = slots.at("year_a").get<int>(), yb = slots.at("year_b").get<int>();
        std::vector<double> diffs;
        for (int y = ya; y < yb; ++y)
            diffs.push_back(bf_value(ctx, ic, c, y + 1) - bf_value(ctx, ic, c, y));
        return number_value(bf_mean(diffs));
    }
    if (template_id == "AverageProperty") {
        auto vals = bf_sweep(ctx, ic, bf_region(ctx, slots.at("region").get<std::string>()),
                             slots.at("year").get<int>(), false);
        return number_value(bf_mean(vals));
    }
    if (template_id == "AveragePropertyComparison") {
        const int yr = slots.at("year").get<int>();
        double vs = bf_value(ctx, ic, bf_country_code(ctx, slots.at("subject").get<std::string>()), yr);
        double m = bf_mean(bf_sweep(ctx, ic, bf_region(ctx, slots.at("region").get<std::string>()), yr, false));
        return json(op_is_highest() ? vs > m : m > vs);
    }
    if (template_id == "CountryPropertyComparison") {
        double va = bf_value(ctx, ic, bf_country_code(ctx, slots.at("subject_a").get<std::string>()),
                             slots.at("year_a").get<int>());
        double vb = bf_value(ctx, ic, bf_country_code(ctx, slots.at("subject_b").get<std::string>()),
                             slots.at("year_b").get<int>());
        return json(op_is_highest() ? va > vb : vb > va);
    }
    if (template_id == "CountryThresholdCount") {
        const int yr = slots.at("year").get<int>();
        const std::string sc = bf_country_code(ctx, slots.at("subject").get<std::string>());
        double vs = bf_value(ctx, ic, sc, yr);
        auto vals = bf_sweep(ctx, ic, bf_region(ctx, slots.at("region").get<std::string>()), yr, false);
        std::int64_t n = 0;
        for (double v : vals) {
            if (close(v, vs)) continue;
            if (op_is_highest() ? v > vs : v < vs) ++n;
        }
        return json(n);
    }
    if (template_id == "PropertyOfSubject") {
        return number_value(bf_value(ctx, ic,
                                     bf_country_code(ctx, slots.at("subject").get<std::string>()),
                                     slots.at("year").get<int>()));
    }
    if (template_id == "PropertyRatioComparison") {
        const int yr = slots.at("year").get<int>();
        double va = bf_value(ctx, ic, bf_country_code(ctx, slots.at("subject_a").get<std::string>()), yr);
        double vb = bf_value(ctx, ic, bf_country_code(ctx, slots.at("subject_b").get<std::string>()), yr);
        double thr = slots.at("threshold").get<double>();
        double ratio = va / vb;
        return json(op_is_highest() ? ratio > thr : thr > ratio);
    }
    if (template_id == "RankChange") {
        const std::string sc = bf_country_code(ctx, slots.at("subject").get<std::string>());
        auto codes = bf_region(ctx, slots.at("region").get<std::string>());
        auto rank_at = [&](int yr) {
            double vs = bf_value(ctx, ic, sc, yr);
            std::int64_t greater = 0;
            for (const auto& code : codes) {
                double v = bf_value(ctx, ic, code, yr);
                if (!close(v, vs) && v > vs) ++greater;
            }
            return 1 + greater;
        };
        return json(rank_at(slots.at("year_a").get<int>()) != rank_at(slots.at("year_b").get<int>()));
    }
    if (template_id == "RegionAverageComparison") {
        const int yr = slots.at("year").get<int>();
        double ma = bf_mean(bf_sweep(ctx, ic, bf_region(ctx, slots.at("region_a").get<std::string>()), yr, false));
        double mb = bf_mean(bf_sweep(ctx, ic, bf_region(ctx, slots.at("region_b").get<std::string>()), yr, false));
        return json(op_is_highest() ? ma > mb : mb > ma);
    }
    if (template_id == "RegionComparison") {
        auto codes = bf_region(ctx, slots.at("region").get<std::string>());
        auto vals = bf_sweep(ctx, ic, codes, slots.at("year").get<int>(), false);
        std::size_t pos = bf_arg_best(vals, op_is_highest());
        return json(ctx.country_by_code(codes[pos])->name);
    }
    if (template_id == "RegionComparisonResult") {
        auto codes = bf_region(ctx, slots.at("region").get<std::string>());
        auto vals = bf_sweep(ctx, ic, codes, slots.at("year_2").get<int>(), false);
        std::size_t pos = bf_arg_best(vals, op_is_highest());
        return number_value(bf_value(ctx, ic, codes[pos], slots.at("year_1").get<int>()));
    }
    if (template_id == "RegionPropertyChange") {
        auto codes = bf_region(ctx, slots.at("region").get<std::string>());
        const int ya = slots.at("year_a").get<int>(), yb = slots.at("year_b").get<int>();
        std::vector<double> diffs;
        for (const auto& code : codes)
            diffs.push_back(bf_value(ctx, ic, code, yb) - bf_value(ctx, ic, code, ya));
        std::size_t pos = bf_arg_best(diffs, op_is_highest());
        return json(ctx.country_by_code(codes[pos])->name);
    }
    if (template_id == "RegionPropertyRatio") {
        auto vals = bf_sweep(ctx, ic, bf_region(ctx, slots.at("region").get<std::string>()),
                             slots.at("year").get<int>(), false);
        double mx = *std::max_element(vals.begin(), vals.end());
        double mn = *std::min_element(vals.begin(), vals.end());
        return number_value(mx / mn);
    }
    if (template_id == "RegionProportion") {
        const int yr = slots.at("year").get<int>();
        double vs = bf_value(ctx, ic, bf_country_code(ctx, slots.at("subject").get<std::string>()), yr);
        auto vals = bf_sweep(ctx, ic, bf_region(ctx, slots.at("region").get<std::string>()), yr, false);
        return number_value(vs / std::accumulate(vals.begin(), vals.end(), 0.0));
    }
    if (template_id == "RegionProportionChange") {
        const std::string sc = bf_country_code(ctx, slots.at("subject").get<std::string>());
        auto codes = bf_region(ctx, slots.at("region").get<std::string>());
        auto share_at = [&](int yr) {
            double vs = bf_value(ctx, ic, sc, yr);
            auto vals = bf_sweep(ctx, ic, codes, yr, false);
            return vs / std::accumulate(vals.begin(), vals.end(), 0.0);
        };
        double sa = share_at(slots.at("year_a").get<int>());
        double sb = share_at(slots.at("year_b").get<int>());
        return json(op_is_highest() ? sa > sb : sb > sa);
    }
    if (template_id == "RegionRangeComparison") {
        const int yr = slots.at("year").get<int>();
        auto range_of = [&](const std::string& key) {
            auto vals = bf_sweep(ctx, ic, bf_region(ctx, slots.at(key).get<std::string>()), yr, false);
            return *std::max_element(vals.begin(), vals.end()) -
                   *std::min_element(vals.begin(), vals.end());
        };
        double ra = range_of("region_a"), rb = range_of("region_b");
        return json(op_is_highest() ? ra > rb : rb > ra);
    }
    if (template_id == "SubjectPropertyChange") {
        const std::string c = bf_country_code(ctx, slots.at("subject").get<std::string>());
        double d = bf_value(ctx, ic, c, slots.at("year_b").get<int>()) -
                   bf_value(ctx, ic, c, slots.at("year_a").get<int>());
        return json(op_is_highest() ? d > 0.0 : 0.0 > d);
    }
    if (template_id == "SubjectPropertyRank") {
        const int yr = slots.at("year").get<int>();
        const std::string sc = bf_country_code(ctx, slots.at("subject").get<std::string>());
        double vs = bf_value(ctx, ic, sc, yr);
        auto vals = bf_sweep(ctx, ic, bf_region(ctx, slots.at("region").get<std::string>()), yr, false);
        std::int64_t greater = 0;
        for (double v : vals)
            if (!close(v, vs) && v > vs) ++greater;
        return json(1 + greater);
    }
    if (template_id == "TopNTotal") {
        auto codes = bf_region(ctx, slots.at("region").get<std::string>());
        auto vals = bf_sweep(ctx, ic, codes, slots.at("year").get<int>(), false);
        std::vector<std::size_t> order(codes.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return vals[a] > vals[b]; });
        const int n = slots.at("n").get<int>();
        json names = json::array();
        if (op_is_highest()) {
            for (int i = 0; i < n; ++i) names.push_back(ctx.country_by_code(codes[order[static_cast<std::size_t>(i)]])->name);
        } else {
            for (int i = n; i >= 1; --i)
                names.push_back(ctx.country_by_code(codes[order[order.size() - static_cast<std::size_t>(i)]])->name);
        }
        return names;
    }
    if (template_id == "TotalProperty") {
        auto vals = bf_sweep(ctx, ic, bf_region(ctx, slots.at("region").get<std::string>()),
                             slots.at("year").get<int>(), false);
        return number_value(std::accumulate(vals.begin(), vals.end(), 0.0));
    }
    throw std::runtime_error("no brute-force route for template " + template_id);
}

}  // namespace wbqa
