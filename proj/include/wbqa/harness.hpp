#pragma once

#include "wbqa/data_context.hpp"
#include "wbqa/templates.hpp"
#include "wbqa/tools.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace wbqa {

struct Message {
    std::string role;  // "system" | "user" | "assistant" | "tool"
    std::optional<std::string> content;
    std::vector<ToolCall> tool_calls;  // assistant only
    std::string tool_call_id;          // tool role only

    // chat-completions wire object
    json to_wire() const;
    json to_json() const;
    static Message from_json(const json& v);
};

struct ProviderConfig {
    std::string base_url = "http://localhost:8000/v1";
    std::string model = "local";
    std::string api_key_env = "WBQA_API_KEY";  // bearer token read from this env var
    json gen_params = json::object();          // merged verbatim into each request
    int max_retries = 3;
    int timeout_sec = 300;
};

struct ChatReply {
    bool ok = false;
    std::string error;  // transport/protocol failure after retries
    Message message;    // the assistant message
};

class ChatProvider {
public:
    virtual ~ChatProvider() = default;
    virtual ChatReply complete(const std::vector<Message>& messages,
                               const std::vector<ToolSpec>& tools) = 0;
};

// speaks the chat-completions wire schema over HTTP; safe to share across
// threads (one connection per request, no mutable state)
class HttpChatProvider : public ChatProvider {
public:
    explicit HttpChatProvider(ProviderConfig cfg);
    ChatReply complete(const std::vector<Message>& messages,
                       const std::vector<ToolSpec>& tools) override;

private:
    ProviderConfig cfg_;
    std::string api_key_;
};

struct RunConfig {
    int n_shot = 0;  // 0, 1, or 3
    ToolMode mode = ToolMode::All;
    int max_turns = 30;
    std::uint64_t nshot_seed = 7;
    std::string model;  // label recorded into transcripts
};

std::string tool_mode_name(ToolMode mode);
ToolMode tool_mode_from_name(const std::string& name);

struct PredictedCall {
    ToolCall call;
    ToolOutcome outcome;

    json to_json() const;
    static PredictedCall from_json(const json& v);
};

struct Transcript {
    std::string question_id;
    RunConfig config;
    std::vector<Message> messages;
    std::vector<PredictedCall> predicted;
    json final_answer;       // null unless has_final
    bool has_final = false;
    int turn_count = 0;
    bool had_error = false;  // any executed call produced an error outcome
    bool failed = false;     // transport failure; excluded from accuracy
    std::string failure;

    json to_json() const;
    static Transcript from_json(const json& v);
};

// base prompt + tool-use prompt + mode appendix (+ n-shot block), then the
// question as the user message
std::vector<Message> build_prompt(const RunConfig& cfg, const std::string& question,
                                  const DataContext& ctx);
std::string system_prompt(const RunConfig& cfg, const DataContext& ctx);

// n examples per non-utility tool in the active mode, each rendered with the
// output its execution actually produced; deterministic per seed
std::string nshot_block(int n, ToolMode mode, const DataContext& ctx, std::uint64_t seed);

// one question through the tool loop: send, execute returned calls, feed
// outcomes back, stop on final_answer or max_turns
Transcript run_episode(const QuestionInstance& q, const DataContext& ctx, ChatProvider& provider,
                       const RunConfig& cfg);

}  // namespace wbqa
