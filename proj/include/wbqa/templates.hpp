#pragma once

#include "wbqa/actions.hpp"
#include "wbqa/data_context.hpp"
#include "wbqa/rng.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace wbqa {

enum class AnswerType { Number, Integer, String, Boolean, ListOfStrings };
std::string answer_type_name(AnswerType type);
AnswerType answer_type_from_name(const std::string& name);

enum class Availability { AnswerableFull, Partial, Unanswerable };
std::string availability_name(Availability mode);
Availability availability_from_name(const std::string& name);

enum class SlotKind { Subject, Region, Property, Year, Operator, N, Threshold };

// comparative templates render the operator slot value "highest"/"lowest" as
// "higher"/"lower" in the question text
enum class OperatorStyle { Superlative, Comparative };

struct SlotSpec {
    std::string name;
    SlotKind kind;
};

struct QuestionTemplate {
    std::string id;
    std::vector<SlotSpec> slots;
    std::vector<std::string> surface_forms;  // 2-4, with <slot> markers
    AnswerType answer_type;
    OperatorStyle operator_style = OperatorStyle::Superlative;
    std::string plan_id;  // key into the plan library; equals id
};

// exactly 20 registered templates
const std::vector<QuestionTemplate>& all_templates();
const QuestionTemplate* template_by_id(const std::string& id);

struct QuestionInstance {
    std::string question_id;
    std::string template_id;
    json slots;  // slot name -> value, plus property_code
    std::string text;
    Availability mode = Availability::AnswerableFull;
    AnswerType answer_type = AnswerType::Number;
    json answer;  // null unless mode == AnswerableFull
    EssentialActionSet essential;

    json to_json() const;
    static QuestionInstance from_json(const json& v);
};

struct GenConfig {
    int n_per_template = 20;
    Availability mode = Availability::AnswerableFull;
    std::uint64_t seed = 0;
    int retry_budget = 200;  // draws per instance before giving up
    // which M49 hierarchy levels the region slot samples from
    std::vector<RegionLevel> region_levels = {RegionLevel::SubRegion, RegionLevel::Intermediate};
    int max_year_span = 5;  // AverageChange year_b - year_a
    std::vector<int> n_choices = {2, 3, 5};
    std::vector<double> thresholds = {0.5, 1.0, 2.0, 5.0, 10.0};
};

struct GenReport {
    std::map<std::string, int> shortfall;  // template id -> instances not produced
    json slot_inventory;                   // Table-style domain size summary
};

struct InstanceDraft {
    json slots;
    std::string text;
    std::size_t surface_idx = 0;
};

// slots + rendered text; empty when a slot domain is empty for this context
std::optional<InstanceDraft> instantiate(const QuestionTemplate& tmpl, const DataContext& ctx,
                                         const GenConfig& cfg, Rng& rng);

// runs the template's plan footprint over the context
Availability classify_availability(const std::string& template_id, const json& slots,
                                   const DataContext& ctx);

// deterministic per seed; instances carry oracle answers + essential actions
// for the answerable_full mode
std::vector<QuestionInstance> sample_dataset(const DataContext& ctx, const GenConfig& cfg,
                                             GenReport* report = nullptr);

json slot_inventory(const DataContext& ctx, const GenConfig& cfg);

void write_dataset(const std::vector<QuestionInstance>& instances, const std::string& path);
std::vector<QuestionInstance> read_dataset(const std::string& path);

}  // namespace wbqa
