#include "wbqa/harness.hpp"

#include "wbqa/http.hpp"
#include "wbqa/rng.hpp"

#include <cstdlib>
#include <set>
#include <stdexcept>

namespace wbqa {

std::string tool_mode_name(ToolMode mode) { return mode == ToolMode::All ? "all" : "data_only"; }

ToolMode tool_mode_from_name(const std::string& name) {
    std::string key = name;
    for (auto& c : key)
        if (c == '-') c = '_';
    if (key == "all") return ToolMode::All;
    if (key == "data_only") return ToolMode::DataOnly;
    throw std::runtime_error("unknown tool mode: " + name);
}

namespace {

const char* kBasePrompt =
    "You are a helpful assistant tasked with answering questions that require multiple "
    "intermediate steps of reasoning to arrive at a final answer.\n"
    "The questions involve using World Bank data for various countries and indicators.\n"
    "The question cannot be answered in a single step, so you must break it down into smaller "
    "tasks, and use the results of each step to inform the next step.\n"
    "Create a step-by-step plan to answer the question, and then execute each step of that plan "
    "to arrive at the final answer.\n"
    "If you need to, take the time to think through the problem and plan your approach before "
    "acting.\n"
    "To help me parse your answer, only provide the answer itself (e.g., the number, list, "
    "string, or boolean value) as your answer. Do not include any additional text or "
    "explanations. Do not perform any rounding or formatting of the answer.";

const char* kToolUsePrompt =
    "You have access to a set of tools to help you answer the question:\n"
    "Pay attention to the tool names, arguments, descriptions, and the types of outputs they "
    "return, and think carefully about how to use them to solve the problem.\n"
    "If there is a tool available that can help you with the next step, you must use it rather "
    "than trying to solve the problem without it.\n"
    "Do not format tool calls inside message content, instead, create them as dedicated tool "
    "calls in the `tool_calls` field of the message.\n"
    "I will execute tool calls that you provide. You can use multiple tools in one step, but "
    "make sure you follow the correct format.\n"
    "Use the results of each tool call to inform your next step. **Passing tool calls as "
    "arguments to other tool calls is not allowed.** Instead, execute each tool call separately "
    "and use the results to perform subsequent calls -- I will not execute nested tool calls.\n"
    "If a tool call fails, use the error message to help you debug the issue, re-plan, and try "
    "again if possible.\n"
    "Only provide the answer itself (e.g., the number, list, string, or boolean value) as your "
    "answer. Do not include any additional text or explanations. Do not perform any rounding or "
    "formatting of the answer.\n"
    "***You must create a `final_answer` tool call to return your final answer - I will not be "
    "able to parse your answer from message content.**";

const char* kDataOnlyExtra =
    "These tools allow you to access World Bank indicators and retrieve data for specific "
    "countries, indicators, and years. Use them to fetch relevant data to answer the question.\n"
    "However, you must **perform any necessary arithmetic manually**, without tool support for "
    "computation. If the answer requires calculations (e.g., summation, averages), you must "
    "compute these yourself based on the retrieved data.";

const char* kNudge = "Please continue using tools or provide a final_answer tool call.";

std::string tool_listing(ToolMode mode) {
    std::vector<std::string> lines;
    for (const auto& spec : schema(mode)) lines.push_back(spec.signature_line());
    return join(lines, "\n");
}

json number_arg(Rng& rng) {
    double v = static_cast<double>(rng.range(1, 99));
    if (rng.uniform(2) == 1) v += 0.5;
    return number_value(v);
}

json values_arg(Rng& rng, std::size_t min_len = 2) {
    const std::size_t len = min_len + rng.uniform(3);
    json arr = json::array();
    for (std::size_t i = 0; i < len; ++i) arr.push_back(number_arg(rng));
    return arr;
}

// fixture-safe random arguments, so every example executes successfully
ToolCall example_call(const ToolSpec& spec, const DataContext& ctx, Rng& rng) {
    ToolCall call;
    call.name = spec.name;
    json& a = call.args;
    if (spec.name == "search_for_indicator_names") {
        const auto& ind = ctx.catalogue[rng.uniform(ctx.catalogue.size())];
        a["keywords"] = tokenize(ind.name);
    } else if (spec.name == "get_country_code_from_name") {
        a["country_name"] = ctx.countries[rng.uniform(ctx.countries.size())].name;
    } else if (spec.name == "get_country_name_from_code") {
        a["country_code"] = ctx.countries[rng.uniform(ctx.countries.size())].code;
    } else if (spec.name == "get_indicator_code_from_name") {
        const auto& ind = ctx.catalogue[rng.uniform(ctx.catalogue.size())];
        const auto names = ind.display_names();
        a["indicator_name"] = names[rng.uniform(names.size())];
    } else if (spec.name == "get_indicator_name_from_code") {
        a["indicator_code"] = ctx.catalogue[rng.uniform(ctx.catalogue.size())].code;
    } else if (spec.name == "get_country_codes_in_region") {
        a["region"] = ctx.regions[rng.uniform(ctx.regions.size())].name;
    } else if (spec.name == "retrieve_value") {
        // draw an existing datum so the example returns a value
        for (int guard = 0; guard < 64; ++guard) {
            const auto& ind = ctx.catalogue[rng.uniform(ctx.catalogue.size())];
            const auto& table = ctx.tables.at(ind.code).values;
            if (table.empty()) continue;
            auto it = table.begin();
            std::advance(it, static_cast<long>(rng.uniform(table.size())));
            a["country_code"] = it->first.first;
            a["indicator_code"] = ind.code;
            a["year"] = it->first.second;
            break;
        }
    } else if (spec.name == "add" || spec.name == "multiply" || spec.name == "mean" ||
               spec.name == "sort" || spec.name == "maximum" || spec.name == "minimum") {
        a["values"] = values_arg(rng);
    } else if (spec.name == "count") {
        json arr = values_arg(rng);
        arr.insert(arr.begin() + static_cast<long>(rng.uniform(arr.size() + 1)), json());
        a["values"] = arr;
    } else if (spec.name == "subtract" || spec.name == "greater_than" ||
               spec.name == "less_than" || spec.name == "divide") {
        a["value_a"] = number_arg(rng);
        a["value_b"] = number_arg(rng);
    } else if (spec.name == "rank" || spec.name == "index") {
        json arr = values_arg(rng);
        a["values"] = arr;
        a["query_value"] = arr[rng.uniform(arr.size())];
    } else {
        throw std::runtime_error("no example generator for tool " + spec.name);
    }
    return call;
}

}  // namespace

std::string nshot_block(int n, ToolMode mode, const DataContext& ctx, std::uint64_t seed) {
    if (n <= 0) return "";
    Rng rng(seed);
    std::vector<std::string> lines;
    for (const auto& spec : schema(mode)) {
        if (spec.group == ToolGroup::Utility) continue;
        for (int i = 0; i < n; ++i) {
            ToolCall call = example_call(spec, ctx, rng);
            ToolOutcome out = execute(call, ctx, mode);
            lines.push_back("- " + spec.name + "(" + call.args.dump() + ") -> " + out.rendered());
        }
    }
    return "Below are examples of the inputs and outputs of each tool:\n" + join(lines, "\n");
}

std::string system_prompt(const RunConfig& cfg, const DataContext& ctx) {
    std::string prompt = std::string(kBasePrompt) + "\n\n" + kToolUsePrompt + "\n\n";
    prompt += "The tools you have access to are below:\n" + tool_listing(cfg.mode);
    if (cfg.mode == ToolMode::DataOnly) prompt += "\n" + std::string(kDataOnlyExtra);
    if (cfg.n_shot > 0)
        prompt += "\n\n" + nshot_block(cfg.n_shot, cfg.mode, ctx, cfg.nshot_seed);
    return prompt;
}

std::vector<Message> build_prompt(const RunConfig& cfg, const std::string& question,
                                  const DataContext& ctx) {
    Message sys;
    sys.role = "system";
    sys.content = system_prompt(cfg, ctx);
    Message user;
    user.role = "user";
    user.content = question;
    return {sys, user};
}

json Message::to_wire() const {
    json m{{"role", role}};
    m["content"] = content ? json(*content) : json();
    if (!tool_calls.empty()) {
        json calls = json::array();
        for (const auto& tc : tool_calls)
            calls.push_back(json{{"id", tc.id},
                                 {"type", "function"},
                                 {"function", json{{"name", tc.name}, {"arguments", tc.args.dump()}}}});
        m["tool_calls"] = calls;
    }
    if (role == "tool") m["tool_call_id"] = tool_call_id;
    return m;
}

json Message::to_json() const {
    json m{{"role", role}};
    m["content"] = content ? json(*content) : json();
    if (!tool_calls.empty()) {
        json calls = json::array();
        for (const auto& tc : tool_calls)
            calls.push_back(json{{"id", tc.id}, {"name", tc.name}, {"args", tc.args}});
        m["tool_calls"] = calls;
    }
    if (!tool_call_id.empty()) m["tool_call_id"] = tool_call_id;
    return m;
}

Message Message::from_json(const json& v) {
    Message m;
    m.role = v.at("role").get<std::string>();
    if (v.contains("content") && v["content"].is_string())
        m.content = v["content"].get<std::string>();
    if (v.contains("tool_calls"))
        for (const auto& tc : v["tool_calls"])
            m.tool_calls.push_back({tc.at("id").get<std::string>(),
                                    tc.at("name").get<std::string>(), tc.value("args", json::object())});
    m.tool_call_id = v.value("tool_call_id", "");
    return m;
}

json PredictedCall::to_json() const {
    json out{{"id", call.id}, {"name", call.name}, {"args", call.args}};
    if (outcome.ok)
        out["outcome"] = json{{"ok", true}, {"payload", outcome.payload}};
    else
        out["outcome"] = json{{"ok", false},
                              {"kind", error_kind_name(outcome.kind)},
                              {"message", outcome.message}};
    return out;
}

PredictedCall PredictedCall::from_json(const json& v) {
    PredictedCall pc;
    pc.call.id = v.at("id").get<std::string>();
    pc.call.name = v.at("name").get<std::string>();
    pc.call.args = v.value("args", json::object());
    const json& o = v.at("outcome");
    pc.outcome.ok = o.at("ok").get<bool>();
    if (pc.outcome.ok) {
        pc.outcome.payload = o.value("payload", json());
    } else {
        pc.outcome.kind = error_kind_from_name(o.value("kind", "BadArguments"));
        pc.outcome.message = o.value("message", "");
    }
    return pc;
}

json Transcript::to_json() const {
    json msgs = json::array();
    for (const auto& m : messages) msgs.push_back(m.to_json());
    json calls = json::array();
    for (const auto& pc : predicted) calls.push_back(pc.to_json());
    return json{{"question_id", question_id},
                {"config", json{{"n_shot", config.n_shot},
                                {"tool_mode", tool_mode_name(config.mode)},
                                {"max_turns", config.max_turns},
                                {"nshot_seed", config.nshot_seed},
                                {"model", config.model}}},
                {"messages", msgs},
                {"predicted_calls", calls},
                {"final_answer", final_answer},
                {"has_final", has_final},
                {"turn_count", turn_count},
                {"had_error", had_error},
                {"failed", failed},
                {"failure", failure}};
}

Transcript Transcript::from_json(const json& v) {
    Transcript t;
    t.question_id = v.at("question_id").get<std::string>();
    const json& c = v.at("config");
    t.config.n_shot = c.value("n_shot", 0);
    t.config.mode = tool_mode_from_name(c.value("tool_mode", "all"));
    t.config.max_turns = c.value("max_turns", 30);
    t.config.nshot_seed = c.value("nshot_seed", std::uint64_t{7});
    t.config.model = c.value("model", "");
    for (const auto& m : v.value("messages", json::array())) t.messages.push_back(Message::from_json(m));
    for (const auto& pc : v.value("predicted_calls", json::array()))
        t.predicted.push_back(PredictedCall::from_json(pc));
    t.final_answer = v.value("final_answer", json());
    t.has_final = v.value("has_final", false);
    t.turn_count = v.value("turn_count", 0);
    t.had_error = v.value("had_error", false);
    t.failed = v.value("failed", false);
    t.failure = v.value("failure", "");
    return t;
}

HttpChatProvider::HttpChatProvider(ProviderConfig cfg) : cfg_(std::move(cfg)) {
    if (!cfg_.api_key_env.empty())
        if (const char* key = std::getenv(cfg_.api_key_env.c_str())) api_key_ = key;
}

ChatReply HttpChatProvider::complete(const std::vector<Message>& messages,
                                     const std::vector<ToolSpec>& tools) {
    json body{{"model", cfg_.model}};
    json msgs = json::array();
    for (const auto& m : messages) msgs.push_back(m.to_wire());
    body["messages"] = msgs;
    if (!tools.empty()) {
        json decls = json::array();
        for (const auto& spec : tools) decls.push_back(spec.wire_schema());
        body["tools"] = decls;
        body["tool_choice"] = "auto";
    }
    for (const auto& [k, v] : cfg_.gen_params.items()) body[k] = v;

    HttpHeaders headers;
    if (!api_key_.empty()) headers.emplace_back("Authorization", "Bearer " + api_key_);

    ChatReply reply;
    std::string last_error = "no attempts made";
    for (int attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
        HttpResult res = http_post_json(cfg_.base_url + "/chat/completions", body.dump(), headers,
                                        cfg_.timeout_sec);
        if (!res.ok) {
            last_error = "transport: " + res.error;
            continue;
        }
        if (res.status == 429 || res.status >= 500) {
            last_error = "HTTP " + std::to_string(res.status);
            continue;
        }
        if (res.status < 200 || res.status >= 300) {
            reply.error = "HTTP " + std::to_string(res.status) + ": " + res.body.substr(0, 200);
            return reply;
        }
        try {
            json parsed = json::parse(res.body);
            const json& wire = parsed.at("choices").at(0).at("message");
            Message m;
            m.role = "assistant";
            if (wire.contains("content") && wire["content"].is_string())
                m.content = wire["content"].get<std::string>();
            if (wire.contains("tool_calls") && wire["tool_calls"].is_array()) {
                int synth = 0;
                for (const auto& tc : wire["tool_calls"]) {
                    ToolCall call;
                    call.id = tc.value("id", "");
                    if (call.id.empty()) call.id = "call_" + std::to_string(++synth);
                    const json& fn = tc.at("function");
                    call.name = fn.at("name").get<std::string>();
                    if (fn.contains("arguments")) {
                        const json& args = fn["arguments"];
                        if (args.is_string()) {
                            try {
                                call.args = json::parse(args.get<std::string>());
                            } catch (const json::exception&) {
                                call.args = args;  // non-object args fail as BadArguments downstream
                            }
                        } else {
                            call.args = args;
                        }
                    }
                    m.tool_calls.push_back(std::move(call));
                }
            }
            reply.ok = true;
            reply.message = std::move(m);
            return reply;
        } catch (const std::exception& e) {
            reply.error = std::string("malformed response: ") + e.what();
            return reply;
        }
    }
    reply.error = last_error;
    return reply;
}

Transcript run_episode(const QuestionInstance& q, const DataContext& ctx, ChatProvider& provider,
                       const RunConfig& cfg) {
    Transcript t;
    t.question_id = q.question_id;
    t.config = cfg;
    t.messages = build_prompt(cfg, q.text, ctx);
    const std::vector<ToolSpec> tools = schema(cfg.mode);

    while (t.turn_count < cfg.max_turns && !t.has_final && !t.failed) {
        ChatReply reply = provider.complete(t.messages, tools);
        ++t.turn_count;
        if (!reply.ok) {
            t.failed = true;
            t.failure = reply.error;
            break;
        }
        t.messages.push_back(reply.message);
        if (reply.message.tool_calls.empty()) {
            if (t.turn_count >= cfg.max_turns) break;
            Message nudge;
            nudge.role = "user";
            nudge.content = std::string(kNudge);
            t.messages.push_back(std::move(nudge));
            continue;
        }
        for (const auto& call : reply.message.tool_calls) {
            ToolOutcome out = execute(call, ctx, cfg.mode);
            t.predicted.push_back({call, out});
            if (call.name == "final_answer") {
                t.final_answer = call.args.is_object() ? call.args.value("answer", json()) : json();
                t.has_final = true;
                break;  // remaining calls in the same reply are not executed
            }
            if (!out.ok) t.had_error = true;
            Message tm;
            tm.role = "tool";
            tm.tool_call_id = call.id;
            tm.content = out.rendered();
            t.messages.push_back(std::move(tm));
        }
    }
    return t;
}

}  // namespace wbqa
