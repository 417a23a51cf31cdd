#pragma once

#include "wbqa/data_context.hpp"
#include "wbqa/util.hpp"

#include <string>
#include <vector>

namespace wbqa {

enum class ErrorKind { UnknownTool, BadArguments, NotFound, NoData, ArithmeticError, NestedCallRejected };
std::string error_kind_name(ErrorKind kind);
ErrorKind error_kind_from_name(const std::string& name);

enum class ToolMode { All, DataOnly };

enum class ToolGroup { Retrieval, Arithmetic, Utility };

struct ToolParam {
    std::string name;
    std::string type;  // "string" | "number" | "integer" | "array" | "any"
    std::string description;
};

struct ToolSpec {
    std::string name;
    std::string description;
    std::vector<ToolParam> params;
    ToolGroup group = ToolGroup::Arithmetic;

    // chat wire schema function declaration
    json wire_schema() const;
    // "name: description Arguments: a: ...; b: ..." for prompt listings
    std::string signature_line() const;
};

struct ToolCall {
    std::string id;
    std::string name;
    json args = json::object();
};

struct ToolOutcome {
    bool ok = false;
    json payload;                            // success only
    ErrorKind kind = ErrorKind::BadArguments;  // error only
    std::string message;                     // "<Kind>: <detail>", <= 400 chars

    static ToolOutcome success(json payload);
    static ToolOutcome failure(ErrorKind kind, const std::string& detail);
    // what goes back into the dialogue: payload dump or the error line
    std::string rendered() const;
};

// all 22 specs in registry order: retrieval, arithmetic, utility
const std::vector<ToolSpec>& all_tool_specs();
const ToolSpec* tool_spec(const std::string& name);

// mode=all -> 22 tools; mode=data_only -> 7 retrieval + think + final_answer
std::vector<ToolSpec> schema(ToolMode mode);
bool tool_in_mode(const std::string& name, ToolMode mode);

// total dispatcher: every input maps to a payload or a typed error
ToolOutcome execute(const ToolCall& call, const DataContext& ctx, ToolMode mode = ToolMode::All);

inline constexpr int kSearchResultCap = 10;

}  // namespace wbqa
