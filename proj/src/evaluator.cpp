#include "wbqa/evaluator.hpp"

#include "wbqa/csv.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace wbqa {

json ScoreCard::to_json() const {
    return json{{"question_id", question_id},
                {"template_id", template_id},
                {"tool_mode", tool_mode_name(mode)},
                {"n_shot", n_shot},
                {"correct", correct},
                {"precision", precision},
                {"recall", recall},
                {"had_error", had_error},
                {"tp", tp},
                {"fp", fp},
                {"matched_essential", matched_essential},
                {"essential_total", essential_total},
                {"failed", failed}};
}

ScoreCard ScoreCard::from_json(const json& v) {
    ScoreCard c;
    c.question_id = v.at("question_id").get<std::string>();
    c.template_id = v.value("template_id", "");
    c.mode = tool_mode_from_name(v.value("tool_mode", "all"));
    c.n_shot = v.value("n_shot", 0);
    c.correct = v.value("correct", false);
    c.precision = v.value("precision", 0.0);
    c.recall = v.value("recall", 0.0);
    c.had_error = v.value("had_error", false);
    c.tp = v.value("tp", 0);
    c.fp = v.value("fp", 0);
    c.matched_essential = v.value("matched_essential", 0);
    c.essential_total = v.value("essential_total", 0);
    c.failed = v.value("failed", false);
    return c;
}

std::vector<NormalizedCall> normalize_calls(const std::vector<PredictedCall>& predicted) {
    std::vector<NormalizedCall> out;
    for (const auto& pc : predicted) {
        if (pc.call.name == "think" || pc.call.name == "final_answer") continue;
        NormalizedCall nc;
        nc.tool = pc.call.name;
        nc.args = pc.call.args;
        nc.payload = pc.outcome.ok ? pc.outcome.payload : json();
        if (nc.tool == "less_than" && nc.args.is_object()) {
            nc.tool = "greater_than";
            json swapped = json::object();
            swapped["value_a"] = nc.args.value("value_b", json());
            swapped["value_b"] = nc.args.value("value_a", json());
            nc.args = std::move(swapped);
        }
        for (const auto& earlier : out) {
            if (earlier.tool == nc.tool && call_args_equal(nc.tool, earlier.args, nc.args)) {
                nc.duplicate = true;
                break;
            }
        }
        out.push_back(std::move(nc));
    }
    return out;
}

MatchStats match_actions(const std::vector<NormalizedCall>& normalized,
                         const EssentialActionSet& essential) {
    MatchStats stats;
    std::vector<bool> used(essential.patterns.size(), false);
    for (const auto& nc : normalized) {
        if (nc.duplicate) {
            ++stats.fp;
            continue;
        }
        bool found = false;
        for (std::size_t i = 0; i < essential.patterns.size(); ++i) {
            if (used[i]) continue;
            if (pattern_matches(essential.patterns[i], nc.tool, nc.args, nc.payload)) {
                used[i] = true;
                ++stats.tp;
                ++stats.matched;
                found = true;
                break;
            }
        }
        if (!found) ++stats.fp;
    }
    return stats;
}

std::pair<double, double> precision_recall(int tp, int fp, int matched, int total) {
    const double precision = (tp + fp) > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
    const double recall = total > 0 ? static_cast<double>(matched) / total : 0.0;
    return {precision, recall};
}

namespace {

// country answers may arrive as a code or a name; both canonicalize to a code
std::string canonical_string(const std::string& s, const DataContext& ctx) {
    const std::string folded = fold(s);
    if (const CountryMeta* c = ctx.country_by_name(folded)) return c->code;
    if (const CountryMeta* c = ctx.country_by_code(upper(trim(s)))) return c->code;
    return folded;
}

bool string_answer_eq(const std::string& predicted, const std::string& gold,
                      const DataContext& ctx) {
    if (fold(predicted) == fold(gold)) return true;
    return canonical_string(predicted, ctx) == canonical_string(gold, ctx);
}

std::vector<std::string> listify(const json& v) {
    std::vector<std::string> out;
    if (v.is_array()) {
        for (const auto& e : v) {
            if (e.is_string()) out.push_back(e.get<std::string>());
            else out.push_back(e.dump());
        }
        return out;
    }
    if (v.is_string()) {
        const std::string s = trim(v.get<std::string>());
        // a serialized list is accepted, otherwise comma-separated items
        try {
            json parsed = json::parse(s);
            if (parsed.is_array()) return listify(parsed);
        } catch (const json::exception&) {
        }
        std::stringstream ss(s);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (!item.empty()) out.push_back(item);
        }
    }
    return out;
}

}  // namespace

bool check_answer(const json& predicted, const json& gold, AnswerType type,
                  const DataContext& ctx) {
    if (predicted.is_null()) return false;
    switch (type) {
        case AnswerType::Number: {
            double p = 0, g = 0;
            if (!coerce_number(predicted, p) || !coerce_number(gold, g)) return false;
            return approx_eq(p, g, 1e-6, 1e-9);
        }
        case AnswerType::Integer: {
            double p = 0, g = 0;
            if (!coerce_number(predicted, p) || !coerce_number(gold, g)) return false;
            return p == g;
        }
        case AnswerType::Boolean: {
            bool p = false;
            if (predicted.is_boolean()) {
                p = predicted.get<bool>();
            } else if (predicted.is_string()) {
                const std::string s = fold(predicted.get<std::string>());
                if (s == "true" || s == "yes") p = true;
                else if (s == "false" || s == "no") p = false;
                else return false;
            } else {
                return false;
            }
            return gold.is_boolean() && p == gold.get<bool>();
        }
        case AnswerType::String: {
            if (!predicted.is_string() || !gold.is_string()) return false;
            return string_answer_eq(predicted.get<std::string>(), gold.get<std::string>(), ctx);
        }
        case AnswerType::ListOfStrings: {
            const auto p = listify(predicted);
            const auto g = listify(gold);
            if (p.size() != g.size() || p.empty()) return false;
            std::vector<bool> used(g.size(), false);
            for (const auto& pe : p) {
                bool found = false;
                for (std::size_t i = 0; i < g.size(); ++i) {
                    if (used[i]) continue;
                    if (string_answer_eq(pe, g[i], ctx)) {
                        used[i] = true;
                        found = true;
                        break;
                    }
                }
                if (!found) return false;
            }
            return true;
        }
    }
    return false;
}

ScoreCard score_transcript(const Transcript& t, const QuestionInstance& q,
                           const DataContext& ctx) {
    ScoreCard card;
    card.question_id = t.question_id;
    card.template_id = q.template_id;
    card.mode = t.config.mode;
    card.n_shot = t.config.n_shot;
    card.failed = t.failed;
    if (t.failed) return card;

    const auto normalized = normalize_calls(t.predicted);
    const MatchStats stats = match_actions(normalized, q.essential);
    card.tp = stats.tp;
    card.fp = stats.fp;
    card.matched_essential = stats.matched;
    card.essential_total = static_cast<int>(q.essential.size());
    const auto [p, r] =
        precision_recall(stats.tp, stats.fp, stats.matched, card.essential_total);
    card.precision = p;
    card.recall = r;
    card.had_error = t.had_error;
    card.correct = t.has_final && check_answer(t.final_answer, q.answer, q.answer_type, ctx);
    return card;
}

namespace {

struct Moments {
    double mean = 0.0, stddev = 0.0;
};

Moments moments(const std::vector<double>& xs) {
    Moments m;
    if (xs.empty()) return m;
    double sum = 0;
    for (double x : xs) sum += x;
    m.mean = sum / static_cast<double>(xs.size());
    double var = 0;
    for (double x : xs) var += (x - m.mean) * (x - m.mean);
    m.stddev = std::sqrt(var / static_cast<double>(xs.size()));
    return m;
}

std::string fmt(double v, int digits = 2) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

}  // namespace

AggregateReport aggregate(const std::vector<ScoreCard>& cards) {
    AggregateReport report;
    std::map<std::pair<std::string, int>, std::vector<const ScoreCard*>> groups;
    std::map<std::string, std::pair<int, int>> mode_hits;  // mode -> (correct, total)
    int err_correct = 0, err_total = 0, ok_correct = 0, ok_total = 0;

    for (const auto& c : cards) {
        if (c.failed) {
            ++report.failed_count;
            continue;
        }
        groups[{tool_mode_name(c.mode), c.n_shot}].push_back(&c);
        auto& mh = mode_hits[tool_mode_name(c.mode)];
        mh.first += c.correct ? 1 : 0;
        mh.second += 1;
        if (c.had_error) {
            ++err_total;
            if (c.correct) ++err_correct;
        } else {
            ++ok_total;
            if (c.correct) ++ok_correct;
        }
    }

    for (const auto& [key, members] : groups) {
        AggregateRow row;
        row.mode = tool_mode_from_name(key.first);
        row.n_shot = key.second;
        row.count = static_cast<int>(members.size());
        std::vector<double> ps, rs;
        int correct = 0, errored = 0;
        for (const ScoreCard* c : members) {
            ps.push_back(c->precision);
            rs.push_back(c->recall);
            if (c->correct) ++correct;
            if (c->had_error) ++errored;
        }
        row.accuracy = row.count ? static_cast<double>(correct) / row.count : 0.0;
        row.err_rate = row.count ? static_cast<double>(errored) / row.count : 0.0;
        const Moments mp = moments(ps), mr = moments(rs);
        row.precision_mean = mp.mean;
        row.precision_std = mp.stddev;
        row.recall_mean = mr.mean;
        row.recall_std = mr.stddev;
        report.rows.push_back(row);
    }

    report.with_error_count = err_total;
    report.without_error_count = ok_total;
    report.accuracy_with_error = err_total ? static_cast<double>(err_correct) / err_total : 0.0;
    report.accuracy_without_error = ok_total ? static_cast<double>(ok_correct) / ok_total : 0.0;
    for (const auto& [mode, hits] : mode_hits)
        report.mode_accuracy[mode] =
            hits.second ? static_cast<double>(hits.first) / hits.second : 0.0;
    return report;
}

json AggregateReport::to_json() const {
    json rows_json = json::array();
    for (const auto& r : rows)
        rows_json.push_back(json{{"tool_mode", tool_mode_name(r.mode)},
                                 {"n_shot", r.n_shot},
                                 {"count", r.count},
                                 {"err_rate", r.err_rate},
                                 {"accuracy", r.accuracy},
                                 {"precision_mean", r.precision_mean},
                                 {"precision_std", r.precision_std},
                                 {"recall_mean", r.recall_mean},
                                 {"recall_std", r.recall_std}});
    return json{{"rows", rows_json},
                {"error_split",
                 json{{"with_error_count", with_error_count},
                      {"accuracy_with_error", accuracy_with_error},
                      {"without_error_count", without_error_count},
                      {"accuracy_without_error", accuracy_without_error}}},
                {"mode_accuracy", mode_accuracy},
                {"failed_count", failed_count}};
}

std::string render_report_markdown(const AggregateReport& report) {
    std::ostringstream out;
    out << "# Evaluation Report\n\n";
    out << "| Tools | n | Err. | Acc. | Precision | Recall |\n";
    out << "|---|---|---|---|---|---|\n";
    for (const auto& r : report.rows) {
        out << "| " << tool_mode_name(r.mode) << " | " << r.n_shot << " | " << fmt(r.err_rate)
            << " | " << fmt(r.accuracy) << " | " << fmt(r.precision_mean) << " ± "
            << fmt(r.precision_std) << " | " << fmt(r.recall_mean) << " ± " << fmt(r.recall_std)
            << " |\n";
    }
    out << "\n## Accuracy by error presence\n\n";
    out << "| Episodes | Count | Acc. |\n|---|---|---|\n";
    out << "| with tool error | " << report.with_error_count << " | "
        << fmt(report.accuracy_with_error) << " |\n";
    out << "| without tool error | " << report.without_error_count << " | "
        << fmt(report.accuracy_without_error) << " |\n";
    if (report.mode_accuracy.size() > 1) {
        out << "\n## Accuracy by tool mode\n\n| Mode | Acc. |\n|---|---|\n";
        for (const auto& [mode, acc] : report.mode_accuracy)
            out << "| " << mode << " | " << fmt(acc) << " |\n";
    }
    if (report.failed_count > 0)
        out << "\nExcluded episodes (transport failures): " << report.failed_count << "\n";
    return out.str();
}

void write_report_files(const AggregateReport& report, const std::vector<ScoreCard>& cards,
                        const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);

    std::ofstream md(fs::path(dir) / "report.md", std::ios::binary);
    md << render_report_markdown(report);

    std::ofstream rc(fs::path(dir) / "report.csv", std::ios::binary);
    rc << "tool_mode,n_shot,count,err_rate,accuracy,precision_mean,precision_std,recall_mean,"
          "recall_std\n";
    for (const auto& r : report.rows)
        rc << tool_mode_name(r.mode) << "," << r.n_shot << "," << r.count << "," << r.err_rate
           << "," << r.accuracy << "," << r.precision_mean << "," << r.precision_std << ","
           << r.recall_mean << "," << r.recall_std << "\n";

    std::ofstream es(fs::path(dir) / "error_split.csv", std::ios::binary);
    es << "episodes,count,accuracy\n";
    es << "with_error," << report.with_error_count << "," << report.accuracy_with_error << "\n";
    es << "without_error," << report.without_error_count << ","
       << report.accuracy_without_error << "\n";

    std::ofstream mc(fs::path(dir) / "mode_comparison.csv", std::ios::binary);
    mc << "tool_mode,accuracy\n";
    for (const auto& [mode, acc] : report.mode_accuracy) mc << mode << "," << acc << "\n";

    std::ofstream cc(fs::path(dir) / "cards.csv", std::ios::binary);
    cc << "question_id,template_id,tool_mode,n_shot,correct,precision,recall,had_error,tp,fp,"
          "matched_essential,essential_total,failed\n";
    for (const auto& c : cards)
        cc << c.question_id << "," << c.template_id << "," << tool_mode_name(c.mode) << ","
           << c.n_shot << "," << (c.correct ? 1 : 0) << "," << c.precision << "," << c.recall
           << "," << (c.had_error ? 1 : 0) << "," << c.tp << "," << c.fp << ","
           << c.matched_essential << "," << c.essential_total << "," << (c.failed ? 1 : 0)
           << "\n";
}

void write_scores(const std::vector<ScoreCard>& cards, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open scores file for writing: " + path);
    for (const auto& c : cards) out << c.to_json().dump() << "\n";
}

std::vector<ScoreCard> read_scores(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open scores file: " + path);
    std::vector<ScoreCard> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json v = json::parse(line);
        if (v.contains("error")) continue;  // per-question error entries carry no scores
        out.push_back(ScoreCard::from_json(v));
    }
    return out;
}

}  // namespace wbqa
