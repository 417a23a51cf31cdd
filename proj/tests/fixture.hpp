#pragma once

#include "wbqa/data_context.hpp"
#include "wbqa/harness.hpp"
#include "wbqa/templates.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace wbqa::fixture {

// Hand-authored context: five countries (GHA, FRA, DEU, BRA, JPN), a
// three-level region hierarchy under World, three indicators over 2005-2008.
// Life expectancy has two holes (GHA 2005, JPN 2007); every per-year column
// and every per-country change column is tie-free.
DataContext small_context(bool with_paraphrases = true);

// Generation config whose region levels match the fixture hierarchy
// (Global + Region + SubRegion; the fixture has no intermediate regions).
GenConfig small_gen_config(Availability mode, std::uint64_t seed);

// In-process provider that returns queued replies in order and records every
// request it saw. Runs out of replies -> transport-style failure.
class ScriptedProvider : public ChatProvider {
public:
    explicit ScriptedProvider(std::vector<ChatReply> replies);
    ChatReply complete(const std::vector<Message>& messages,
                       const std::vector<ToolSpec>& tools) override;

    const std::vector<std::vector<Message>>& seen_messages() const { return seen_messages_; }
    const std::vector<std::vector<ToolSpec>>& seen_tools() const { return seen_tools_; }

private:
    std::vector<ChatReply> replies_;
    std::size_t next_ = 0;
    std::vector<std::vector<Message>> seen_messages_;
    std::vector<std::vector<ToolSpec>> seen_tools_;
};

ChatReply assistant_calls(std::vector<ToolCall> calls);
ChatReply assistant_text(const std::string& content);
ToolCall call_of(const std::string& name, const json& args, const std::string& id = "");

// Serves the open-data wire format for the fixture catalogue: the three real
// indicators plus two normalized "(% ...)" ones that ingestion must drop, a
// null datum, a row for an unrecognized aggregate code, and an out-of-range
// year. Optionally fails the first `fail_first` requests with 503 to
// exercise retries.
class WbApiServer {
public:
    explicit WbApiServer(int fail_first = 0);
    ~WbApiServer();
    WbApiServer(const WbApiServer&) = delete;
    WbApiServer& operator=(const WbApiServer&) = delete;

    std::string base_url() const;
    int request_count() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Chat-completions endpoint that plays a perfect scripted participant:
// paraphrase requests get three name variants; question episodes replay the
// gold essential actions one call per turn, then final_answer with the gold
// answer. Questions are matched by the first user message's text.
class OracleChatServer {
public:
    OracleChatServer();
    ~OracleChatServer();
    OracleChatServer(const OracleChatServer&) = delete;
    OracleChatServer& operator=(const OracleChatServer&) = delete;

    // must be called before episodes run; safe while the server is up
    void load_gold(const std::vector<QuestionInstance>& dataset);

    std::string base_url() const;  // ends in /v1

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// M49-style CSV matching the fixture hierarchy, including one row with a
// malformed ISO-alpha3 code that ingestion must skip with a warning.
void write_m49_csv(const std::string& path);

// unique scratch directory under the system temp root; removed on destruction
class TempDir {
public:
    explicit TempDir(const std::string& tag);
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::string& path() const { return path_; }
    std::string file(const std::string& name) const;

private:
    std::string path_;
};

}  // namespace wbqa::fixture
