#pragma once

#include "wbqa/actions.hpp"
#include "wbqa/data_context.hpp"

#include <functional>
#include <string>
#include <vector>

namespace wbqa {

// Answerable    all data present; answer + essential actions produced
// Partial       a tolerant aggregate (mean/add sweep) lost members but stays
//               computable
// Unanswerable  a critical datum is missing
// Invalid       the draw itself is degenerate (zero denominator, duplicate
//               values where uniqueness is needed, unsearchable indicator) —
//               generation resamples these
enum class PlanOutcome { Answerable, Partial, Unanswerable, Invalid };

struct PlanResult {
    PlanOutcome outcome = PlanOutcome::Invalid;
    json answer;  // Answerable only
    EssentialActionSet essential;
    std::string note;  // diagnostic for non-Answerable outcomes
};

struct SolutionPlan {
    std::string plan_id;
    std::vector<std::string> steps;  // human-readable outline of the call sequence
    std::function<PlanResult(const json& slots, const DataContext& ctx)> run;
};

// throws on unknown id; all 20 templates are registered
const SolutionPlan& plan_for(const std::string& template_id);

// runs the template's canonical plan through the tool registry, recording
// every non-utility call into the essential set
PlanResult execute_plan(const std::string& template_id, const json& slots, const DataContext& ctx);

// independent straight-line computation over the value tables (no tool
// registry); defined for draws whose plan outcome is Answerable
json brute_force_answer(const std::string& template_id, const json& slots, const DataContext& ctx);

}  // namespace wbqa
