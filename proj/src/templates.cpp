#include "wbqa/templates.hpp"

#include "wbqa/oracle.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <stdexcept>

namespace wbqa {

std::string answer_type_name(AnswerType type) {
    switch (type) {
        case AnswerType::Number: return "number";
        case AnswerType::Integer: return "integer";
        case AnswerType::String: return "string";
        case AnswerType::Boolean: return "boolean";
        case AnswerType::ListOfStrings: return "list_of_strings";
    }
    return "number";
}

AnswerType answer_type_from_name(const std::string& name) {
    if (name == "number") return AnswerType::Number;
    if (name == "integer") return AnswerType::Integer;
    if (name == "string") return AnswerType::String;
    if (name == "boolean") return AnswerType::Boolean;
    if (name == "list_of_strings") return AnswerType::ListOfStrings;
    throw std::runtime_error("unknown answer type: " + name);
}

std::string availability_name(Availability mode) {
    switch (mode) {
        case Availability::AnswerableFull: return "answerable_full";
        case Availability::Partial: return "partial";
        case Availability::Unanswerable: return "unanswerable";
    }
    return "answerable_full";
}

Availability availability_from_name(const std::string& name) {
    std::string key = name;
    std::replace(key.begin(), key.end(), '-', '_');
    if (key == "answerable_full") return Availability::AnswerableFull;
    if (key == "partial") return Availability::Partial;
    if (key == "unanswerable") return Availability::Unanswerable;
    throw std::runtime_error("unknown availability mode: " + name);
}

namespace {

SlotSpec slot(const std::string& name) {
    SlotKind kind = SlotKind::Subject;
    if (name.rfind("subject", 0) == 0) kind = SlotKind::Subject;
    else if (name.rfind("region", 0) == 0) kind = SlotKind::Region;
    else if (name == "property") kind = SlotKind::Property;
    else if (name.rfind("year", 0) == 0) kind = SlotKind::Year;
    else if (name == "operator") kind = SlotKind::Operator;
    else if (name == "n") kind = SlotKind::N;
    else if (name == "threshold") kind = SlotKind::Threshold;
    else throw std::runtime_error("unknown slot name: " + name);
    return {name, kind};
}

std::vector<SlotSpec> slots_of(const std::vector<std::string>& names) {
    std::vector<SlotSpec> out;
    for (const auto& n : names) out.push_back(slot(n));
    return out;
}

}  // namespace

const std::vector<QuestionTemplate>& all_templates() {
    static const std::vector<QuestionTemplate> templates = [] {
        std::vector<QuestionTemplate> t;
        auto reg = [&](const std::string& id, const std::vector<std::string>& slot_names,
                       std::vector<std::string> forms, AnswerType type, OperatorStyle style) {
            t.push_back({id, slots_of(slot_names), std::move(forms), type, style, id});
        };
        reg("AverageChange", {"property", "subject", "year_a", "year_b"},
            {"What was the average yearly change in <property> for <subject> between <year_a> and "
             "<year_b>?",
             "On average, how much did <property> change per year for <subject> from <year_a> to "
             "<year_b>?",
             "Between <year_a> and <year_b>, what was the mean annual change in <property> for "
             "<subject>?"},
            AnswerType::Number, OperatorStyle::Superlative);
        reg("AverageProperty", {"property", "region", "year"},
            {"What was the average value of <property> in <region> in <year>?",
             "What was the mean <property> across countries in <region> in <year>?",
             "In <year>, what was the average <property> among the countries of <region>?"},
            AnswerType::Number, OperatorStyle::Superlative);
        reg("AveragePropertyComparison", {"property", "subject", "operator", "region", "year"},
            {"Was the <property> of <subject> <operator> than the average value for <region> in "
             "<year>?",
             "In <year>, did <subject> have a <operator> <property> than the average across "
             "<region>?",
             "Was <subject>'s <property> <operator> than the <region> average in <year>?"},
            AnswerType::Boolean, OperatorStyle::Comparative);
        reg("CountryPropertyComparison",
            {"subject_a", "operator", "property", "year_a", "subject_b", "year_b"},
            {"Did <subject_a> have a <operator> <property> in <year_a> than <subject_b> had in "
             "<year_b>?",
             "Was the <property> of <subject_a> in <year_a> <operator> than that of <subject_b> "
             "in <year_b>?",
             "Compared with <subject_b> in <year_b>, did <subject_a> have a <operator> <property> "
             "in <year_a>?"},
            AnswerType::Boolean, OperatorStyle::Comparative);
        reg("CountryThresholdCount", {"region", "operator", "property", "subject", "year"},
            {"How many countries in <region> had a <operator> <property> than <subject> in "
             "<year>?",
             "In <year>, how many countries in <region> recorded a <operator> <property> than "
             "<subject>?",
             "Count the countries in <region> with a <operator> <property> than <subject> in "
             "<year>."},
            AnswerType::Integer, OperatorStyle::Comparative);
        reg("PropertyOfSubject", {"property", "subject", "year"},
            {"What was the value of <property> for <subject> in <year>?",
             "What was the <property> of <subject> in <year>?",
             "In <year>, what value did <subject> record for <property>?"},
            AnswerType::Number, OperatorStyle::Superlative);
        reg("PropertyRatioComparison",
            {"property", "subject_a", "subject_b", "year", "operator", "threshold"},
            {"Was the ratio of <property> for <subject_a> to <subject_b> in <year> <operator> "
             "than <threshold>?",
             "In <year>, was <subject_a>'s <property> divided by <subject_b>'s <operator> than "
             "<threshold>?",
             "Did the ratio of <property> between <subject_a> and <subject_b> in <year> come out "
             "<operator> than <threshold>?"},
            AnswerType::Boolean, OperatorStyle::Comparative);
        reg("RankChange", {"subject", "property", "region", "year_a", "year_b"},
            {"Did the rank of <subject> in <property> in <region> change between <year_a> and "
             "<year_b>?",
             "Between <year_a> and <year_b>, did <subject>'s rank in <property> within <region> "
             "change?",
             "Did <subject> move in the <region> ranking of <property> between <year_a> and "
             "<year_b>?"},
            AnswerType::Boolean, OperatorStyle::Superlative);
        reg("RegionAverageComparison", {"region_a", "operator", "property", "region_b", "year"},
            {"Did <region_a> have a <operator> average <property> than <region_b> in <year>?",
             "In <year>, was the average <property> in <region_a> <operator> than in <region_b>?",
             "Was the mean <property> of <region_a> <operator> than that of <region_b> in "
             "<year>?"},
            AnswerType::Boolean, OperatorStyle::Comparative);
        reg("RegionComparison", {"region", "operator", "property", "year"},
            {"Which country in the region of <region> had the <operator> <property> in <year>?",
             "In <year>, which country in <region> recorded the <operator> <property>?",
             "Which of the countries in <region> had the <operator> <property> in <year>?"},
            AnswerType::String, OperatorStyle::Superlative);
        reg("RegionComparisonResult", {"region", "operator", "property", "year_2", "year_1"},
            {"For the country in <region> that had the <operator> <property> in <year_2>, what "
             "was its value in <year_1>?",
             "What was the <property> in <year_1> for the country that had the <operator> value "
             "in <region> in <year_2>?",
             "Take the country with the <operator> <property> in <region> in <year_2>; what was "
             "its value in <year_1>?"},
            AnswerType::Number, OperatorStyle::Superlative);
        reg("RegionPropertyChange", {"region", "operator", "property", "year_a", "year_b"},
            {"Which country in <region> had the <operator> change in <property> between <year_a> "
             "and <year_b>?",
             "Between <year_a> and <year_b>, which country in <region> saw the <operator> change "
             "in <property>?",
             "Which <region> country recorded the <operator> change in <property> from <year_a> "
             "to <year_b>?"},
            AnswerType::String, OperatorStyle::Superlative);
        reg("RegionPropertyRatio", {"property", "region", "year"},
            {"What was the ratio of <property> values in <region> in <year>?",
             "In <year>, what was the ratio of the highest to the lowest <property> in <region>?",
             "What was the ratio between the largest and smallest <property> values in <region> "
             "in <year>?"},
            AnswerType::Number, OperatorStyle::Superlative);
        reg("RegionProportion", {"property", "region", "year", "subject"},
            {"What proportion of the total <property> in <region> in <year> was contributed by "
             "<subject>?",
             "In <year>, what share of <region>'s total <property> came from <subject>?",
             "What fraction of the total <property> across <region> in <year> did <subject> "
             "account for?"},
            AnswerType::Number, OperatorStyle::Superlative);
        reg("RegionProportionChange",
            {"subject", "property", "region", "operator", "year_a", "year_b"},
            {"Was <subject>'s share of the total <property> in <region> <operator> in <year_a> "
             "than it was in <year_b>?",
             "Did <subject> hold a <operator> share of <region>'s total <property> in <year_a> "
             "than in <year_b>?",
             "Compared with <year_b>, was <subject>'s proportion of the total <property> in "
             "<region> <operator> in <year_a>?"},
            AnswerType::Boolean, OperatorStyle::Comparative);
        reg("RegionRangeComparison", {"region_a", "operator", "property", "region_b", "year"},
            {"Did <region_a> have a <operator> range of values for <property> than <region_b> in "
             "<year>?",
             "In <year>, was the spread of <property> values <operator> in <region_a> than in "
             "<region_b>?",
             "Was the range of <property> across <region_a> <operator> than across <region_b> in "
             "<year>?"},
            AnswerType::Boolean, OperatorStyle::Comparative);
        reg("SubjectPropertyChange", {"subject", "operator", "property", "year_a", "year_b"},
            {"Did <subject> have a <operator> change in <property> between <year_a> and "
             "<year_b>?",
             "Between <year_a> and <year_b>, did <subject> see a <operator> change in "
             "<property>?",
             "Did <subject>'s <property> show a <operator> change between <year_a> and "
             "<year_b>?"},
            AnswerType::Boolean, OperatorStyle::Comparative);
        reg("SubjectPropertyRank", {"subject", "property", "region", "year"},
            {"What was the rank of <subject> in <property> in <region> in <year>?",
             "In <year>, where did <subject> rank in <property> among the countries of <region>?",
             "What rank did <subject> hold for <property> within <region> in <year>?"},
            AnswerType::Integer, OperatorStyle::Superlative);
        reg("TopNTotal", {"n", "region", "operator", "property", "year"},
            {"Which <n> countries in <region> had the <operator> total <property> in <year>?",
             "In <year>, which <n> countries in <region> recorded the <operator> total <property>?",
             "Name the <n> countries in <region> with the <operator> total <property> in <year>."},
            AnswerType::ListOfStrings, OperatorStyle::Superlative);
        reg("TotalProperty", {"property", "region", "year"},
            {"What was the total value of <property> in <region> in <year>?",
             "What was the combined <property> across all countries in <region> in <year>?",
             "In <year>, what was the total <property> for <region> as a whole?"},
            AnswerType::Number, OperatorStyle::Superlative);
        return t;
    }();
    return templates;
}

const QuestionTemplate* template_by_id(const std::string& id) {
    for (const auto& t : all_templates())
        if (t.id == id) return &t;
    return nullptr;
}

json QuestionInstance::to_json() const {
    return json{{"question_id", question_id},
                {"template_id", template_id},
                {"slots", slots},
                {"text", text},
                {"mode", availability_name(mode)},
                {"answer_type", answer_type_name(answer_type)},
                {"answer", answer},
                {"essential_actions", essential.to_json()}};
}

QuestionInstance QuestionInstance::from_json(const json& v) {
    QuestionInstance qi;
    qi.question_id = v.at("question_id").get<std::string>();
    qi.template_id = v.at("template_id").get<std::string>();
    qi.slots = v.at("slots");
    qi.text = v.at("text").get<std::string>();
    qi.mode = availability_from_name(v.at("mode").get<std::string>());
    qi.answer_type = answer_type_from_name(v.at("answer_type").get<std::string>());
    qi.answer = v.value("answer", json());
    if (v.contains("essential_actions"))
        qi.essential = EssentialActionSet::from_json(v.at("essential_actions"));
    return qi;
}

namespace {

std::string render_slot_value(const SlotSpec& spec, const json& v, OperatorStyle style) {
    switch (spec.kind) {
        case SlotKind::Year:
        case SlotKind::N:
            return std::to_string(v.get<long long>());
        case SlotKind::Threshold:
            return render_number(v.get<double>());
        case SlotKind::Operator: {
            const std::string op = v.get<std::string>();
            if (style == OperatorStyle::Comparative) return op == "highest" ? "higher" : "lower";
            return op;
        }
        default:
            return v.get<std::string>();
    }
}

std::string apply_slots(const QuestionTemplate& tmpl, const std::string& form, const json& slots) {
    std::string text = form;
    for (const auto& spec : tmpl.slots) {
        const std::string marker = "<" + spec.name + ">";
        const std::string value = render_slot_value(spec, slots.at(spec.name), tmpl.operator_style);
        std::size_t pos = 0;
        while ((pos = text.find(marker, pos)) != std::string::npos) {
            text.replace(pos, marker.size(), value);
            pos += value.size();
        }
    }
    return text;
}

// the drawing kit shared by all templates; every draw consumes rng state in a
// fixed order so generation stays byte-identical per seed
struct Drawer {
    const DataContext& ctx;
    const GenConfig& cfg;
    Rng& rng;

    const IndicatorMeta* property() {
        if (ctx.catalogue.empty()) return nullptr;
        return &ctx.catalogue[rng.uniform(ctx.catalogue.size())];
    }
    std::string display_of(const IndicatorMeta& ind) {
        if (ind.paraphrases.size() == 3) return ind.paraphrases[rng.uniform(3)];
        return ind.name;
    }
    std::vector<const RegionMeta*> eligible_regions(std::size_t min_members,
                                                    const RegionMeta* exclude = nullptr) const {
        std::vector<const RegionMeta*> out;
        for (const auto& r : ctx.regions) {
            if (std::find(cfg.region_levels.begin(), cfg.region_levels.end(), r.level) ==
                cfg.region_levels.end())
                continue;
            if (r.countries.size() < min_members) continue;
            if (exclude && r.name == exclude->name) continue;
            out.push_back(&r);
        }
        return out;
    }
    const RegionMeta* region(std::size_t min_members, const RegionMeta* exclude = nullptr) {
        auto pool = eligible_regions(min_members, exclude);
        if (pool.empty()) return nullptr;
        return pool[rng.uniform(pool.size())];
    }
    const CountryMeta* country() {
        if (ctx.countries.empty()) return nullptr;
        return &ctx.countries[rng.uniform(ctx.countries.size())];
    }
    // a second country distinct from index `first`
    const CountryMeta* other_country(const CountryMeta* first) {
        if (ctx.countries.size() < 2) return nullptr;
        std::size_t ia = static_cast<std::size_t>(first - ctx.countries.data());
        std::size_t ib = rng.uniform(ctx.countries.size() - 1);
        if (ib >= ia) ++ib;
        return &ctx.countries[ib];
    }
    const CountryMeta* member_of(const RegionMeta& r) {
        const std::string& code = r.countries[rng.uniform(r.countries.size())];
        return ctx.country_by_code(code);
    }
    int year() { return rng.range(ctx.year_min, ctx.year_max); }
    int year_not(int taken) {
        int y = ctx.year_min + static_cast<int>(rng.uniform(
                    static_cast<std::size_t>(ctx.year_max - ctx.year_min)));
        if (y >= taken) ++y;
        return y;
    }
    // year_a < year_b; span capped when cap > 0
    bool year_pair(int& ya, int& yb, int cap = 0) {
        if (ctx.year_max <= ctx.year_min) return false;
        ya = rng.range(ctx.year_min, ctx.year_max - 1);
        int max_span = ctx.year_max - ya;
        if (cap > 0) max_span = std::min(max_span, cap);
        yb = ya + rng.range(1, max_span);
        return true;
    }
    std::string op() { return rng.uniform(2) == 0 ? "highest" : "lowest"; }

    bool multi_year() const { return ctx.year_max > ctx.year_min; }
};

}  // namespace

std::optional<InstanceDraft> instantiate(const QuestionTemplate& tmpl, const DataContext& ctx,
                                         const GenConfig& cfg, Rng& rng) {
    Drawer d{ctx, cfg, rng};
    const std::string& id = tmpl.id;
    json slots = json::object();

    const IndicatorMeta* ind = d.property();
    if (!ind) return std::nullopt;
    const std::string display = d.display_of(*ind);

    auto put_property = [&] {
        slots["property"] = display;
    };
    auto finish = [&]() -> std::optional<InstanceDraft> {
        slots["property_code"] = ind->code;
        std::size_t surface_idx = rng.uniform(tmpl.surface_forms.size());
        InstanceDraft draft;
        draft.slots = std::move(slots);
        draft.text = apply_slots(tmpl, tmpl.surface_forms[surface_idx], draft.slots);
        draft.surface_idx = surface_idx;
        return draft;
    };

    if (id == "AverageChange") {
        const CountryMeta* c = d.country();
        int ya = 0, yb = 0;
        if (!c || !d.year_pair(ya, yb, cfg.max_year_span)) return std::nullopt;
        put_property();
        slots["subject"] = c->name;
        slots["year_a"] = ya;
        slots["year_b"] = yb;
        return finish();
    }
    if (id == "AverageProperty" || id == "TotalProperty" || id == "RegionPropertyRatio") {
        const RegionMeta* r = d.region(2);
        if (!r) return std::nullopt;
        put_property();
        slots["region"] = r->name;
        slots["year"] = d.year();
        return finish();
    }
    if (id == "AveragePropertyComparison") {
        const RegionMeta* r = d.region(2);
        const CountryMeta* c = d.country();
        if (!r || !c) return std::nullopt;
        put_property();
        slots["subject"] = c->name;
        slots["operator"] = d.op();
        slots["region"] = r->name;
        slots["year"] = d.year();
        return finish();
    }
    if (id == "CountryPropertyComparison") {
        const CountryMeta* ca = d.country();
        if (!ca) return std::nullopt;
        const CountryMeta* cb = d.other_country(ca);
        if (!cb) return std::nullopt;
        slots["subject_a"] = ca->name;
        slots["operator"] = d.op();
        put_property();
        slots["year_a"] = d.year();
        slots["subject_b"] = cb->name;
        slots["year_b"] = d.year();
        return finish();
    }
    if (id == "CountryThresholdCount") {
        const RegionMeta* r = d.region(2);
        const CountryMeta* c = d.country();
        if (!r || !c) return std::nullopt;
        slots["region"] = r->name;
        slots["operator"] = d.op();
        put_property();
        slots["subject"] = c->name;
        slots["year"] = d.year();
        return finish();
    }
    if (id == "PropertyOfSubject") {
        const CountryMeta* c = d.country();
        if (!c) return std::nullopt;
        put_property();
        slots["subject"] = c->name;
        slots["year"] = d.year();
        return finish();
    }
    if (id == "PropertyRatioComparison") {
        const CountryMeta* ca = d.country();
        if (!ca) return std::nullopt;
        const CountryMeta* cb = d.other_country(ca);
        if (!cb) return std::nullopt;
        put_property();
        slots["subject_a"] = ca->name;
        slots["subject_b"] = cb->name;
        slots["year"] = d.year();
        slots["operator"] = d.op();
        slots["threshold"] = cfg.thresholds.empty() ? 1.0 : rng.pick(cfg.thresholds);
        return finish();
    }
    if (id == "RankChange") {
        const RegionMeta* r = d.region(2);
        if (!r) return std::nullopt;
        const CountryMeta* c = d.member_of(*r);
        int ya = 0, yb = 0;
        if (!c || !d.year_pair(ya, yb)) return std::nullopt;
        slots["subject"] = c->name;
        put_property();
        slots["region"] = r->name;
        slots["year_a"] = ya;
        slots["year_b"] = yb;
        return finish();
    }
    if (id == "RegionAverageComparison" || id == "RegionRangeComparison") {
        const RegionMeta* ra = d.region(2);
        if (!ra) return std::nullopt;
        const RegionMeta* rb = d.region(2, ra);
        if (!rb) return std::nullopt;
        slots["region_a"] = ra->name;
        slots["operator"] = d.op();
        put_property();
        slots["region_b"] = rb->name;
        slots["year"] = d.year();
        return finish();
    }
    if (id == "RegionComparison") {
        const RegionMeta* r = d.region(2);
        if (!r) return std::nullopt;
        slots["region"] = r->name;
        slots["operator"] = d.op();
        put_property();
        slots["year"] = d.year();
        return finish();
    }
    if (id == "RegionComparisonResult") {
        const RegionMeta* r = d.region(2);
        if (!r || !d.multi_year()) return std::nullopt;
        slots["region"] = r->name;
        slots["operator"] = d.op();
        put_property();
        int y2 = d.year();
        slots["year_2"] = y2;
        slots["year_1"] = d.year_not(y2);
        return finish();
    }
    if (id == "RegionPropertyChange") {
        const RegionMeta* r = d.region(2);
        int ya = 0, yb = 0;
        if (!r || !d.year_pair(ya, yb)) return std::nullopt;
        slots["region"] = r->name;
        slots["operator"] = d.op();
        put_property();
        slots["year_a"] = ya;
        slots["year_b"] = yb;
        return finish();
    }
    if (id == "RegionProportion") {
        const RegionMeta* r = d.region(2);
        if (!r) return std::nullopt;
        const CountryMeta* c = d.member_of(*r);
        if (!c) return std::nullopt;
        put_property();
        slots["region"] = r->name;
        slots["year"] = d.year();
        slots["subject"] = c->name;
        return finish();
    }
    if (id == "RegionProportionChange") {
        const RegionMeta* r = d.region(2);
        if (!r || !d.multi_year()) return std::nullopt;
        const CountryMeta* c = d.member_of(*r);
        if (!c) return std::nullopt;
        slots["subject"] = c->name;
        put_property();
        slots["region"] = r->name;
        slots["operator"] = d.op();
        int ya = d.year();
        slots["year_a"] = ya;
        slots["year_b"] = d.year_not(ya);
        return finish();
    }
    if (id == "SubjectPropertyChange") {
        const CountryMeta* c = d.country();
        int ya = 0, yb = 0;
        if (!c || !d.year_pair(ya, yb)) return std::nullopt;
        slots["subject"] = c->name;
        slots["operator"] = d.op();
        put_property();
        slots["year_a"] = ya;
        slots["year_b"] = yb;
        return finish();
    }
    if (id == "SubjectPropertyRank") {
        const RegionMeta* r = d.region(2);
        if (!r) return std::nullopt;
        const CountryMeta* c = d.member_of(*r);
        if (!c) return std::nullopt;
        slots["subject"] = c->name;
        put_property();
        slots["region"] = r->name;
        slots["year"] = d.year();
        return finish();
    }
    if (id == "TopNTotal") {
        if (cfg.n_choices.empty()) return std::nullopt;
        const int n = rng.pick(cfg.n_choices);
        const RegionMeta* r = d.region(static_cast<std::size_t>(n) + 1);
        if (!r) return std::nullopt;
        slots["n"] = n;
        slots["region"] = r->name;
        slots["operator"] = d.op();
        put_property();
        slots["year"] = d.year();
        return finish();
    }
    throw std::runtime_error("no instantiation logic for template " + id);
}

Availability classify_availability(const std::string& template_id, const json& slots,
                                   const DataContext& ctx) {
    PlanResult r = execute_plan(template_id, slots, ctx);
    switch (r.outcome) {
        case PlanOutcome::Answerable: return Availability::AnswerableFull;
        case PlanOutcome::Partial: return Availability::Partial;
        case PlanOutcome::Unanswerable: return Availability::Unanswerable;
        case PlanOutcome::Invalid: break;
    }
    throw std::runtime_error("degenerate slot binding for " + template_id + ": " + r.note);
}

namespace {

std::string ordinal_id(const std::string& template_id, int ordinal) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d", ordinal);
    return template_id + "-" + buf;
}

}  // namespace

std::vector<QuestionInstance> sample_dataset(const DataContext& ctx, const GenConfig& cfg,
                                             GenReport* report) {
    std::vector<QuestionInstance> out;
    GenReport rep;
    for (const auto& tmpl : all_templates()) {
        Rng rng(Rng::derive(cfg.seed, tmpl.id));
        std::set<std::string> seen;
        int produced = 0;
        while (produced < cfg.n_per_template) {
            bool got = false;
            for (int attempt = 0; attempt < cfg.retry_budget; ++attempt) {
                // a failed draw (e.g. no region is large enough for the drawn
                // n) consumes an attempt; the slot domain may still hold other
                // viable combinations
                auto draft = instantiate(tmpl, ctx, cfg, rng);
                if (!draft) continue;
                const std::string key =
                    json{{"slots", draft->slots}, {"surface", draft->surface_idx}}.dump();
                if (seen.count(key)) continue;
                PlanResult pr = execute_plan(tmpl.id, draft->slots, ctx);
                if (pr.outcome == PlanOutcome::Invalid) {
                    seen.insert(key);
                    continue;
                }
                Availability avail = pr.outcome == PlanOutcome::Answerable
                                         ? Availability::AnswerableFull
                                         : (pr.outcome == PlanOutcome::Partial
                                                ? Availability::Partial
                                                : Availability::Unanswerable);
                seen.insert(key);
                if (avail != cfg.mode) continue;
                QuestionInstance qi;
                qi.question_id = ordinal_id(tmpl.id, produced + 1);
                qi.template_id = tmpl.id;
                qi.slots = draft->slots;
                qi.text = draft->text;
                qi.mode = avail;
                qi.answer_type = tmpl.answer_type;
                if (avail == Availability::AnswerableFull) {
                    qi.answer = pr.answer;
                    qi.essential = std::move(pr.essential);
                }
                out.push_back(std::move(qi));
                ++produced;
                got = true;
                break;
            }
            if (!got) break;
        }
        if (produced < cfg.n_per_template) rep.shortfall[tmpl.id] = cfg.n_per_template - produced;
    }
    rep.slot_inventory = slot_inventory(ctx, cfg);
    if (report) *report = std::move(rep);
    return out;
}

json slot_inventory(const DataContext& ctx, const GenConfig& cfg) {
    std::size_t min_n = 0;
    for (int n : cfg.n_choices)
        if (min_n == 0 || static_cast<std::size_t>(n) < min_n) min_n = static_cast<std::size_t>(n);

    std::size_t regions2 = 0, regions_topn = 0;
    for (const auto& r : ctx.regions) {
        if (std::find(cfg.region_levels.begin(), cfg.region_levels.end(), r.level) ==
            cfg.region_levels.end())
            continue;
        if (r.countries.size() >= 2) ++regions2;
        if (min_n > 0 && r.countries.size() >= min_n + 1) ++regions_topn;
    }

    const std::size_t years = static_cast<std::size_t>(ctx.year_max - ctx.year_min + 1);
    json per_template = json::object();
    for (const auto& tmpl : all_templates()) {
        json domain = json::object();
        for (const auto& spec : tmpl.slots) {
            switch (spec.kind) {
                case SlotKind::Property: domain[spec.name] = ctx.catalogue.size(); break;
                case SlotKind::Subject: domain[spec.name] = ctx.countries.size(); break;
                case SlotKind::Region:
                    domain[spec.name] = tmpl.id == "TopNTotal" ? regions_topn : regions2;
                    break;
                case SlotKind::Year: domain[spec.name] = years; break;
                case SlotKind::Operator: domain[spec.name] = 2; break;
                case SlotKind::N: domain[spec.name] = cfg.n_choices.size(); break;
                case SlotKind::Threshold: domain[spec.name] = cfg.thresholds.size(); break;
            }
        }
        per_template[tmpl.id] =
            json{{"surface_forms", tmpl.surface_forms.size()}, {"slot_domains", domain}};
    }
    return json{{"indicators", ctx.catalogue.size()},
                {"countries", ctx.countries.size()},
                {"eligible_regions", regions2},
                {"years", years},
                {"templates", all_templates().size()},
                {"per_template", per_template}};
}

void write_dataset(const std::vector<QuestionInstance>& instances, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open dataset file for writing: " + path);
    for (const auto& qi : instances) out << qi.to_json().dump() << "\n";
}

std::vector<QuestionInstance> read_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open dataset file: " + path);
    std::vector<QuestionInstance> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            out.push_back(QuestionInstance::from_json(json::parse(line)));
        } catch (const std::exception& e) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace wbqa
