#pragma once

#include "wbqa/actions.hpp"
#include "wbqa/harness.hpp"
#include "wbqa/templates.hpp"

#include <map>
#include <string>
#include <vector>

namespace wbqa {

struct ScoreCard {
    std::string question_id;
    std::string template_id;
    ToolMode mode = ToolMode::All;
    int n_shot = 0;
    bool correct = false;
    double precision = 0.0;
    double recall = 0.0;
    bool had_error = false;
    int tp = 0;
    int fp = 0;
    int matched_essential = 0;
    int essential_total = 0;
    bool failed = false;  // transport failure; excluded from aggregates

    json to_json() const;
    static ScoreCard from_json(const json& v);
};

struct NormalizedCall {
    std::string tool;
    json args;
    json payload;           // execution result, used by the search matcher
    bool duplicate = false; // an earlier call had the same tool + arguments
};

// drop think/final_answer, rewrite less_than(a,b) -> greater_than(b,a), and
// flag exact duplicates so only the first instance can match
std::vector<NormalizedCall> normalize_calls(const std::vector<PredictedCall>& predicted);

struct MatchStats {
    int tp = 0;
    int fp = 0;
    int matched = 0;
};

// greedy in-order matching of normalized calls against unmatched patterns
MatchStats match_actions(const std::vector<NormalizedCall>& normalized,
                         const EssentialActionSet& essential);

// precision = tp/(tp+fp), 0 when no calls; recall = matched/total
std::pair<double, double> precision_recall(int tp, int fp, int matched, int total);

bool check_answer(const json& predicted, const json& gold, AnswerType type,
                  const DataContext& ctx);

ScoreCard score_transcript(const Transcript& t, const QuestionInstance& q, const DataContext& ctx);

struct AggregateRow {
    ToolMode mode = ToolMode::All;
    int n_shot = 0;
    int count = 0;
    double err_rate = 0.0;
    double accuracy = 0.0;
    double precision_mean = 0.0, precision_std = 0.0;
    double recall_mean = 0.0, recall_std = 0.0;
};

struct AggregateReport {
    std::vector<AggregateRow> rows;  // one per (mode, n_shot) present
    // accuracy among episodes with >=1 error outcome vs none
    int with_error_count = 0, without_error_count = 0;
    double accuracy_with_error = 0.0, accuracy_without_error = 0.0;
    // accuracy per tool mode, when both modes are present
    std::map<std::string, double> mode_accuracy;
    int failed_count = 0;  // excluded episodes
    json to_json() const;
};

AggregateReport aggregate(const std::vector<ScoreCard>& cards);

std::string render_report_markdown(const AggregateReport& report);

// report.md, report.csv, error_split.csv, mode_comparison.csv, cards.csv
void write_report_files(const AggregateReport& report, const std::vector<ScoreCard>& cards,
                        const std::string& dir);

void write_scores(const std::vector<ScoreCard>& cards, const std::string& path);
std::vector<ScoreCard> read_scores(const std::string& path);

}  // namespace wbqa
