#include "wbqa/cli.hpp"

#include "wbqa/evaluator.hpp"
#include "wbqa/harness.hpp"
#include "wbqa/ingest.hpp"
#include "wbqa/oracle.hpp"
#include "wbqa/templates.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

namespace wbqa {

namespace {

namespace fs = std::filesystem;

json parse_gen_params(const std::string& raw) {
    if (raw.empty()) return json::object();
    json v = json::parse(raw);
    if (!v.is_object()) throw std::runtime_error("--gen-params must be a JSON object");
    return v;
}

std::vector<RegionLevel> parse_region_levels(const std::string& raw) {
    std::vector<RegionLevel> out;
    std::stringstream ss(raw);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        auto level = region_level_from_name(item);
        if (!level) throw std::runtime_error("unknown region level: " + item);
        out.push_back(*level);
    }
    if (out.empty()) throw std::runtime_error("no region levels given");
    return out;
}

int cmd_ingest(const IngestConfig& cfg, const std::string& out_dir) {
    DataContext ctx = run_ingest(cfg);
    persist_context(ctx, out_dir);
    std::cout << "ingested " << ctx.catalogue.size() << " indicators, " << ctx.countries.size()
              << " countries, " << ctx.regions.size() << " regions into " << out_dir << "\n";
    return 0;
}

int cmd_paraphrase(const std::string& data_dir, const ProviderConfig& pcfg, int retries) {
    DataContext ctx = load_context(data_dir);
    HttpChatProvider provider(pcfg);
    const int updated = paraphrase_catalogue(ctx, provider, retries, &std::cerr);
    persist_context(ctx, data_dir);
    std::cout << "paraphrased " << updated << " of " << ctx.catalogue.size() << " indicators\n";
    return 0;
}

int cmd_generate(const std::string& data_dir, const GenConfig& cfg, const std::string& out_path,
                 const std::string& inventory_path) {
    DataContext ctx = load_context(data_dir);
    GenReport report;
    auto dataset = sample_dataset(ctx, cfg, &report);
    write_dataset(dataset, out_path);
    std::cout << "generated " << dataset.size() << " instances ("
              << availability_name(cfg.mode) << ", seed " << cfg.seed << ") into " << out_path
              << "\n";
    for (const auto& [tid, missing] : report.shortfall)
        std::cerr << "shortfall: " << tid << " produced " << (cfg.n_per_template - missing)
                  << "/" << cfg.n_per_template << "\n";
    if (!inventory_path.empty()) {
        std::ofstream inv(inventory_path, std::ios::binary);
        inv << report.slot_inventory.dump(2) << "\n";
    } else {
        std::cout << "slot inventory: " << report.slot_inventory.dump() << "\n";
    }
    return report.shortfall.empty() ? 0 : 2;
}

int cmd_run(const std::string& data_dir, const std::string& dataset_path,
            const std::string& out_dir, const ProviderConfig& pcfg, const RunConfig& base_cfg,
            int concurrency) {
    DataContext ctx = load_context(data_dir);
    auto dataset = read_dataset(dataset_path);
    fs::create_directories(out_dir);

    RunConfig rcfg = base_cfg;
    rcfg.model = pcfg.model;

    std::vector<const QuestionInstance*> todo;
    int skipped = 0;
    for (const auto& q : dataset) {
        if (fs::exists(fs::path(out_dir) / (q.question_id + ".json"))) {
            ++skipped;  // resume: completed episodes are not re-run
            continue;
        }
        todo.push_back(&q);
    }
    if (skipped) std::cout << "resuming: " << skipped << " transcripts already present\n";

    std::atomic<std::size_t> cursor{0};
    std::atomic<int> failures{0};
    std::mutex io;
    auto worker = [&] {
        HttpChatProvider provider(pcfg);
        while (true) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= todo.size()) break;
            const QuestionInstance& q = *todo[i];
            Transcript t = run_episode(q, ctx, provider, rcfg);
            if (t.failed) failures.fetch_add(1);
            const fs::path path = fs::path(out_dir) / (q.question_id + ".json");
            {
                std::lock_guard<std::mutex> lock(io);
                std::ofstream out(path, std::ios::binary);
                out << t.to_json().dump() << "\n";
                std::cout << q.question_id << (t.failed ? " FAILED: " + t.failure : "") << "\n";
            }
        }
    };
    const int width = std::max(1, concurrency);
    std::vector<std::thread> pool;
    for (int i = 0; i < width; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    std::cout << "ran " << todo.size() << " episodes (" << failures.load() << " failed)\n";
    return 0;
}

int cmd_score(const std::string& data_dir, const std::string& dataset_path,
              const std::string& runs_dir, const std::string& out_path) {
    DataContext ctx = load_context(data_dir);
    auto dataset = read_dataset(dataset_path);
    std::map<std::string, const QuestionInstance*> gold;
    for (const auto& q : dataset) gold[q.question_id] = &q;

    std::vector<ScoreCard> cards;
    std::vector<json> error_entries;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(runs_dir))
        if (entry.is_regular_file() && entry.path().extension() == ".json")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());

    for (const auto& path : files) {
        std::ifstream in(path, std::ios::binary);
        std::string line;
        std::getline(in, line);
        Transcript t = Transcript::from_json(json::parse(line));
        auto it = gold.find(t.question_id);
        if (it == gold.end()) {
            std::cerr << "score: no gold record for " << t.question_id << "\n";
            error_entries.push_back(
                json{{"question_id", t.question_id}, {"error", "no gold record in dataset"}});
            continue;
        }
        cards.push_back(score_transcript(t, *it->second, ctx));
    }

    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open scores file for writing: " + out_path);
    for (const auto& c : cards) out << c.to_json().dump() << "\n";
    for (const auto& e : error_entries) out << e.dump() << "\n";
    std::cout << "scored " << cards.size() << " episodes into " << out_path;
    if (!error_entries.empty()) std::cout << " (" << error_entries.size() << " without gold)";
    std::cout << "\n";
    return 0;
}

int cmd_report(const std::string& scores_path, const std::string& out_dir) {
    auto cards = read_scores(scores_path);
    if (cards.empty()) {
        std::cerr << "report: no scorecards in " << scores_path << "\n";
        return 1;
    }
    AggregateReport report = aggregate(cards);
    write_report_files(report, cards, out_dir);
    std::cout << render_report_markdown(report);
    return 0;
}

int cmd_replay_oracle(const std::string& data_dir, const std::string& dataset_path) {
    DataContext ctx = load_context(data_dir);
    auto dataset = read_dataset(dataset_path);
    std::vector<ScoreCard> cards;
    int skipped = 0;
    for (const auto& q : dataset) {
        if (q.mode != Availability::AnswerableFull) {
            ++skipped;
            continue;
        }
        Transcript t;
        t.question_id = q.question_id;
        int k = 0;
        for (const auto& pattern : q.essential.patterns) {
            ToolCall call{"oracle-" + std::to_string(++k), pattern.tool, pattern.args};
            ToolOutcome out = execute(call, ctx, ToolMode::All);
            if (!out.ok) t.had_error = true;
            t.predicted.push_back({call, out});
        }
        t.final_answer = q.answer;
        t.has_final = true;
        t.turn_count = 1;
        cards.push_back(score_transcript(t, q, ctx));
    }
    if (skipped)
        std::cout << "replay-oracle: skipped " << skipped
                  << " instances without full availability\n";
    if (cards.empty()) {
        std::cerr << "replay-oracle: no answerable_full instances in " << dataset_path << "\n";
        return 1;
    }
    double acc = 0, p = 0, r = 0, err = 0;
    bool all_perfect = true;
    for (const auto& c : cards) {
        acc += c.correct ? 1 : 0;
        p += c.precision;
        r += c.recall;
        err += c.had_error ? 1 : 0;
        if (!c.correct || c.precision < 1.0 || c.recall < 1.0 || c.had_error) {
            all_perfect = false;
            std::cerr << "replay-oracle: imperfect card " << c.question_id << " acc="
                      << c.correct << " p=" << c.precision << " r=" << c.recall << "\n";
        }
    }
    const double n = static_cast<double>(cards.size());
    std::cout << "replay-oracle: " << cards.size() << " instances, accuracy = " << (acc / n)
              << ", mean precision = " << (p / n) << ", mean recall = " << (r / n)
              << ", err_rate = " << (err / n) << "\n";
    return all_perfect ? 0 : 1;
}

}  // namespace

int run_cli(int argc, char** argv) {
    CLI::App app{"Evaluation environment for tool-calling QA over World Bank indicator data"};
    app.require_subcommand(1);

    // ingest
    auto* ingest = app.add_subcommand("ingest", "Fetch indicators, data, and regions; persist CSVs");
    IngestConfig icfg;
    std::string ingest_out = "data";
    ingest->add_option("--api-base", icfg.api_base, "Open-data API base URL")
        ->capture_default_str();
    ingest->add_option("--m49", icfg.m49_path, "M49 tabulation CSV path")->required();
    ingest->add_option("--year-min", icfg.year_min, "First year ingested")->capture_default_str();
    ingest->add_option("--year-max", icfg.year_max, "Last year ingested")->capture_default_str();
    ingest->add_option("--max-indicators", icfg.max_indicators,
                       "Cap the catalogue size (0 = all)")
        ->capture_default_str();
    ingest->add_option("--out", ingest_out, "Output data directory")->capture_default_str();

    // paraphrase
    auto* paraphrase =
        app.add_subcommand("paraphrase", "Add three indicator-name paraphrases via a chat model");
    std::string par_data = "data";
    ProviderConfig par_provider;
    int par_retries = 2;
    std::string par_gen_params;
    paraphrase->add_option("--data", par_data, "Data directory")->capture_default_str();
    paraphrase->add_option("--base-url", par_provider.base_url, "Chat endpoint base URL")
        ->capture_default_str();
    paraphrase->add_option("--model", par_provider.model, "Model name")->capture_default_str();
    paraphrase->add_option("--api-key-env", par_provider.api_key_env,
                           "Environment variable holding the bearer token")
        ->capture_default_str();
    paraphrase->add_option("--retries", par_retries, "Retries per indicator")
        ->capture_default_str();
    paraphrase->add_option("--gen-params", par_gen_params, "JSON object merged into requests");

    // generate
    auto* generate = app.add_subcommand("generate", "Sample a question dataset");
    std::string gen_data = "data", gen_out = "dataset.jsonl", gen_mode = "answerable-full";
    std::string gen_levels = "subregion,intermediate", gen_inventory;
    GenConfig gcfg;
    generate->add_option("--data", gen_data, "Data directory")->capture_default_str();
    generate->add_option("--n-per-template", gcfg.n_per_template, "Instances per template")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    generate
        ->add_option("--mode", gen_mode,
                     "Availability mode: answerable-full | partial | unanswerable")
        ->check(CLI::IsMember({"answerable-full", "partial", "unanswerable"}))
        ->capture_default_str();
    generate->add_option("--seed", gcfg.seed, "Generation seed")->capture_default_str();
    generate->add_option("--retry-budget", gcfg.retry_budget, "Draws per instance")
        ->capture_default_str();
    generate->add_option("--region-levels", gen_levels,
                         "Comma list of global,region,subregion,intermediate")
        ->capture_default_str();
    generate->add_option("--max-year-span", gcfg.max_year_span, "Largest year window")
        ->capture_default_str();
    generate->add_option("--out", gen_out, "Dataset JSONL path")->capture_default_str();
    generate->add_option("--inventory", gen_inventory, "Write slot inventory JSON here");

    // run
    auto* run = app.add_subcommand("run", "Run episodes against a chat endpoint");
    std::string run_data = "data", run_dataset = "dataset.jsonl", run_out = "runs";
    ProviderConfig run_provider;
    std::string run_gen_params, run_tools = "all";
    RunConfig rcfg;
    int run_concurrency = 4;
    run->add_option("--data", run_data, "Data directory")->capture_default_str();
    run->add_option("--dataset", run_dataset, "Dataset JSONL path")->capture_default_str();
    run->add_option("--out", run_out, "Transcript directory")->capture_default_str();
    run->add_option("--base-url", run_provider.base_url, "Chat endpoint base URL")
        ->capture_default_str();
    run->add_option("--model", run_provider.model, "Model name")->capture_default_str();
    run->add_option("--api-key-env", run_provider.api_key_env,
                    "Environment variable holding the bearer token")
        ->capture_default_str();
    run->add_option("--gen-params", run_gen_params, "JSON object merged into requests");
    run->add_option("--retries", run_provider.max_retries, "Transport retries per request")
        ->capture_default_str();
    run->add_option("--timeout", run_provider.timeout_sec, "Request timeout (seconds)")
        ->capture_default_str();
    run->add_option("--n-shot", rcfg.n_shot, "Tool examples per tool in the system prompt")
        ->check(CLI::IsMember({0, 1, 3}))
        ->capture_default_str();
    run->add_option("--tools", run_tools, "Tool mode: all | data-only")
        ->check(CLI::IsMember({"all", "data-only"}))
        ->capture_default_str();
    run->add_option("--max-turns", rcfg.max_turns, "Turn budget per episode")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    run->add_option("--nshot-seed", rcfg.nshot_seed, "Seed for n-shot examples")
        ->capture_default_str();
    run->add_option("--concurrency", run_concurrency, "Concurrent episodes")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    // score
    auto* score = app.add_subcommand("score", "Score transcripts against the dataset");
    std::string score_data = "data", score_dataset = "dataset.jsonl", score_runs = "runs",
                score_out = "scores.jsonl";
    score->add_option("--data", score_data, "Data directory")->capture_default_str();
    score->add_option("--dataset", score_dataset, "Dataset JSONL path")->capture_default_str();
    score->add_option("--runs", score_runs, "Transcript directory")->capture_default_str();
    score->add_option("--out", score_out, "Scores JSONL path")->capture_default_str();

    // report
    auto* report = app.add_subcommand("report", "Aggregate scores into report tables");
    std::string report_scores = "scores.jsonl", report_out = "report";
    report->add_option("--scores", report_scores, "Scores JSONL path")->capture_default_str();
    report->add_option("--out", report_out, "Report output directory")->capture_default_str();

    // replay-oracle
    auto* replay = app.add_subcommand(
        "replay-oracle", "Self-test: replay essential actions and verify perfect scores");
    std::string replay_data = "data", replay_dataset = "dataset.jsonl";
    replay->add_option("--data", replay_data, "Data directory")->capture_default_str();
    replay->add_option("--dataset", replay_dataset, "Dataset JSONL path")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (ingest->parsed()) return cmd_ingest(icfg, ingest_out);
        if (paraphrase->parsed()) {
            par_provider.gen_params = parse_gen_params(par_gen_params);
            return cmd_paraphrase(par_data, par_provider, par_retries);
        }
        if (generate->parsed()) {
            gcfg.mode = availability_from_name(gen_mode);
            gcfg.region_levels = parse_region_levels(gen_levels);
            return cmd_generate(gen_data, gcfg, gen_out, gen_inventory);
        }
        if (run->parsed()) {
            run_provider.gen_params = parse_gen_params(run_gen_params);
            rcfg.mode = tool_mode_from_name(run_tools);
            return cmd_run(run_data, run_dataset, run_out, run_provider, rcfg, run_concurrency);
        }
        if (score->parsed()) return cmd_score(score_data, score_dataset, score_runs, score_out);
        if (report->parsed()) return cmd_report(report_scores, report_out);
        if (replay->parsed()) return cmd_replay_oracle(replay_data, replay_dataset);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace wbqa
