#include "fixture.hpp"
#include "wbqa/rng.hpp"
#include "wbqa/tools.hpp"

#include <doctest.h>

#include <set>

using namespace wbqa;

namespace {

ToolOutcome run(const std::string& name, const json& args, const DataContext& ctx,
                ToolMode mode = ToolMode::All) {
    return execute(ToolCall{"t1", name, args}, ctx, mode);
}

const DataContext& ctx() {
    static const DataContext c = fixture::small_context();
    return c;
}

}  // namespace

TEST_CASE("registry holds the 22 tools with their published metadata") {
    // (name, description, parameter names joined) — the externally visible
    // contract the prompts and wire schemas are built from
    struct Expected {
        const char* name;
        const char* description;
        std::vector<const char*> params;
        ToolGroup group;
    };
    const std::vector<Expected> expected = {
        {"search_for_indicator_names",
         "Retrieve indicator names and descriptions that match the given keywords.",
         {"keywords"},
         ToolGroup::Retrieval},
        {"get_country_code_from_name",
         "Get the three-letter country code from a country name.",
         {"country_name"},
         ToolGroup::Retrieval},
        {"get_country_name_from_code",
         "Get the country name from a three-letter country code.",
         {"country_code"},
         ToolGroup::Retrieval},
        {"get_indicator_code_from_name",
         "Get the indicator code from an indicator name.",
         {"indicator_name"},
         ToolGroup::Retrieval},
        {"get_indicator_name_from_code",
         "Get the indicator name from an indicator code.",
         {"indicator_code"},
         ToolGroup::Retrieval},
        {"get_country_codes_in_region",
         "Get the list of country codes in a given region.",
         {"region"},
         ToolGroup::Retrieval},
        {"retrieve_value",
         "Return the value of an indicator for a country at a given year.",
         {"country_code", "indicator_code", "year"},
         ToolGroup::Retrieval},
        {"add", "Add a list of numbers.", {"values"}, ToolGroup::Arithmetic},
        {"subtract", "Subtract value_b from value_a.", {"value_a", "value_b"},
         ToolGroup::Arithmetic},
        {"greater_than", "Check if value_a is greater than value_b.", {"value_a", "value_b"},
         ToolGroup::Arithmetic},
        {"less_than", "Check if value_a is less than value_b.", {"value_a", "value_b"},
         ToolGroup::Arithmetic},
        {"multiply", "Multiply a list of numbers.", {"values"}, ToolGroup::Arithmetic},
        {"divide", "Divide two numbers.", {"value_a", "value_b"}, ToolGroup::Arithmetic},
        {"mean", "Calculate the mean of a list of numbers.", {"values"}, ToolGroup::Arithmetic},
        {"maximum", "Return the maximum of a list of numbers.", {"values"},
         ToolGroup::Arithmetic},
        {"minimum", "Return the minimum of a list of numbers.", {"values"},
         ToolGroup::Arithmetic},
        {"count", "Count the number of non-None elements in a list.", {"values"},
         ToolGroup::Arithmetic},
        {"rank", "Return the 1-based rank of query_value in values sorted descending.",
         {"values", "query_value"}, ToolGroup::Arithmetic},
        {"sort", "Sort a list of numbers.", {"values"}, ToolGroup::Arithmetic},
        {"index", "Return the 0-based index of query_value in values.",
         {"values", "query_value"}, ToolGroup::Arithmetic},
        {"think", "Record a thought or plan for the next step.", {"thought"},
         ToolGroup::Utility},
        {"final_answer", "Submit your final answer.", {"answer"}, ToolGroup::Utility},
    };

    const auto& specs = all_tool_specs();
    REQUIRE(specs.size() == 22);
    for (std::size_t i = 0; i < expected.size(); ++i) {
        CAPTURE(expected[i].name);
        CHECK(specs[i].name == expected[i].name);
        CHECK(specs[i].description == expected[i].description);
        CHECK(specs[i].group == expected[i].group);
        REQUIRE(specs[i].params.size() == expected[i].params.size());
        for (std::size_t j = 0; j < expected[i].params.size(); ++j)
            CHECK(specs[i].params[j].name == expected[i].params[j]);
    }
}

TEST_CASE("schemas follow the active tool mode") {
    auto all = schema(ToolMode::All);
    CHECK(all.size() == 22);

    auto data_only = schema(ToolMode::DataOnly);
    REQUIRE(data_only.size() == 9);
    std::set<std::string> names;
    for (const auto& s : data_only) names.insert(s.name);
    CHECK(names == std::set<std::string>{
                       "search_for_indicator_names", "get_country_code_from_name",
                       "get_country_name_from_code", "get_indicator_code_from_name",
                       "get_indicator_name_from_code", "get_country_codes_in_region",
                       "retrieve_value", "think", "final_answer"});

    CHECK(tool_in_mode("add", ToolMode::All));
    CHECK_FALSE(tool_in_mode("add", ToolMode::DataOnly));
    CHECK(tool_in_mode("retrieve_value", ToolMode::DataOnly));
    CHECK(tool_in_mode("final_answer", ToolMode::DataOnly));
    CHECK_FALSE(tool_in_mode("no_such_tool", ToolMode::All));
}

TEST_CASE("wire schema is a chat-completions function declaration") {
    const ToolSpec* spec = tool_spec("retrieve_value");
    REQUIRE(spec != nullptr);
    json w = spec->wire_schema();
    CHECK(w["type"] == "function");
    CHECK(w["function"]["name"] == "retrieve_value");
    CHECK(w["function"]["description"] ==
          "Return the value of an indicator for a country at a given year.");
    const json& params = w["function"]["parameters"];
    CHECK(params["type"] == "object");
    CHECK(params["properties"].contains("country_code"));
    CHECK(params["properties"]["year"]["type"] == "integer");
    CHECK(params["required"] == json::array({"country_code", "indicator_code", "year"}));

    // "any" carries no type constraint
    json idx = tool_spec("index")->wire_schema();
    CHECK_FALSE(idx["function"]["parameters"]["properties"]["query_value"].contains("type"));
}

TEST_CASE("signature lines pair every argument with its description") {
    const ToolSpec* spec = tool_spec("subtract");
    REQUIRE(spec != nullptr);
    CHECK(spec->signature_line() ==
          "subtract: Subtract value_b from value_a. Arguments: value_a: The first number; "
          "value_b: The second number.");
}

TEST_CASE("search scores keyword overlap against names and descriptions") {
    auto out = run("search_for_indicator_names", {{"keywords", json::array({"population", "size"})}},
                   ctx());
    REQUIRE(out.ok);
    REQUIRE(out.payload.is_array());
    REQUIRE(out.payload.size() >= 1);
    CHECK(out.payload.size() <= kSearchResultCap);
    for (const auto& row : out.payload) {
        CHECK(row.contains("name"));
        CHECK(row.contains("description"));
    }
    // the best match is a display name of the population indicator
    const auto* best = ctx().indicator_by_name(out.payload[0]["name"].get<std::string>());
    REQUIRE(best != nullptr);
    CHECK(best->code == "SP.POP.TOTL");

    SUBCASE("a bare string query works") {
        auto s = run("search_for_indicator_names", {{"keywords", "life expectancy"}}, ctx());
        REQUIRE(s.ok);
        CHECK(ctx().indicator_by_name(s.payload[0]["name"].get<std::string>())->code ==
              "SP.DYN.LE00.IN");
    }
    SUBCASE("no overlap yields an empty result, not an error") {
        auto s = run("search_for_indicator_names", {{"keywords", json::array({"zzzz"})}}, ctx());
        REQUIRE(s.ok);
        CHECK(s.payload.empty());
    }
    SUBCASE("empty keywords are rejected") {
        auto s = run("search_for_indicator_names", {{"keywords", json::array()}}, ctx());
        CHECK_FALSE(s.ok);
        CHECK(s.kind == ErrorKind::BadArguments);
    }
}

TEST_CASE("name and code lookups resolve both directions") {
    CHECK(run("get_country_code_from_name", {{"country_name", "Ghana"}}, ctx()).payload == "GHA");
    CHECK(run("get_country_code_from_name", {{"country_name", " gHaNa "}}, ctx()).payload ==
          "GHA");
    CHECK(run("get_country_name_from_code", {{"country_code", "JPN"}}, ctx()).payload == "Japan");
    CHECK(run("get_indicator_code_from_name", {{"indicator_name", "Population, total"}}, ctx())
              .payload == "SP.POP.TOTL");
    CHECK(run("get_indicator_code_from_name", {{"indicator_name", "farmland area"}}, ctx())
              .payload == "AG.LND.AGRI.K2");
    CHECK(run("get_indicator_name_from_code", {{"indicator_code", "SP.DYN.LE00.IN"}}, ctx())
              .payload == "Life expectancy at birth, total (years)");
    CHECK(run("get_country_codes_in_region", {{"region", "Europe"}}, ctx()).payload ==
          json::array({"DEU", "FRA"}));
    CHECK(run("get_country_codes_in_region", {{"region", "world"}}, ctx()).payload.size() == 5);
}

TEST_CASE("failed lookups name the problem and suggest close matches") {
    auto out = run("get_country_code_from_name", {{"country_name", "Germny"}}, ctx());
    CHECK_FALSE(out.ok);
    CHECK(out.kind == ErrorKind::NotFound);
    CHECK(out.message.find("NotFound: ") == 0);
    CHECK(out.message.find("Germany") != std::string::npos);

    auto ind = run("get_indicator_code_from_name", {{"indicator_name", "GDP"}}, ctx());
    CHECK_FALSE(ind.ok);
    CHECK(ind.message.find("search_for_indicator_names") != std::string::npos);

    CHECK(run("get_country_name_from_code", {{"country_code", "XXX"}}, ctx()).kind ==
          ErrorKind::NotFound);
    CHECK(run("get_country_codes_in_region", {{"region", "Narnia"}}, ctx()).kind ==
          ErrorKind::NotFound);
    CHECK(run("get_indicator_name_from_code", {{"indicator_code", "XX.Y"}}, ctx()).kind ==
          ErrorKind::NotFound);
}

TEST_CASE("retrieve_value distinguishes data presence from entity existence") {
    auto found = run("retrieve_value",
                     {{"country_code", "GHA"}, {"indicator_code", "SP.POP.TOTL"}, {"year", 2005}},
                     ctx());
    REQUIRE(found.ok);
    CHECK(found.payload == 21.0);

    auto missing = run("retrieve_value",
                       {{"country_code", "JPN"}, {"indicator_code", "SP.DYN.LE00.IN"}, {"year", 2007}},
                       ctx());
    CHECK_FALSE(missing.ok);
    CHECK(missing.kind == ErrorKind::NoData);
    CHECK(missing.message.find("NoData: ") == 0);

    CHECK(run("retrieve_value",
              {{"country_code", "XXX"}, {"indicator_code", "SP.POP.TOTL"}, {"year", 2005}}, ctx())
              .kind == ErrorKind::NotFound);
    CHECK(run("retrieve_value",
              {{"country_code", "GHA"}, {"indicator_code", "XX.Y"}, {"year", 2005}}, ctx())
              .kind == ErrorKind::NotFound);

    SUBCASE("year accepts integral strings, rejects fractions") {
        auto coerced = run("retrieve_value", {{"country_code", "GHA"},
                                              {"indicator_code", "SP.POP.TOTL"},
                                              {"year", "2006"}},
                           ctx());
        REQUIRE(coerced.ok);
        CHECK(coerced.payload == 21.6);
        CHECK(run("retrieve_value", {{"country_code", "GHA"},
                                     {"indicator_code", "SP.POP.TOTL"},
                                     {"year", 2005.5}},
                  ctx())
                  .kind == ErrorKind::BadArguments);
    }
}

TEST_CASE("arithmetic matches its published semantics") {
    CHECK(run("add", {{"values", json::array({1, 2, 3.5})}}, ctx()).payload == 6.5);
    CHECK(run("multiply", {{"values", json::array({2, 3, 4})}}, ctx()).payload == 24);
    CHECK(run("subtract", {{"value_a", 10}, {"value_b", 4.5}}, ctx()).payload == 5.5);
    CHECK(run("divide", {{"value_a", 9}, {"value_b", 2}}, ctx()).payload == 4.5);
    CHECK(run("mean", {{"values", json::array({1, 2, 3, 4})}}, ctx()).payload == 2.5);
    CHECK(run("maximum", {{"values", json::array({3, 9, 1})}}, ctx()).payload == 9);
    CHECK(run("minimum", {{"values", json::array({3, 9, 1})}}, ctx()).payload == 1);
    CHECK(run("greater_than", {{"value_a", 2}, {"value_b", 1}}, ctx()).payload == true);
    CHECK(run("less_than", {{"value_a", 2}, {"value_b", 1}}, ctx()).payload == false);

    SUBCASE("numeric strings coerce inside lists and scalars") {
        CHECK(run("add", {{"values", json::array({"1", "2"})}}, ctx()).payload == 3);
        CHECK(run("subtract", {{"value_a", "10"}, {"value_b", "3"}}, ctx()).payload == 7);
    }
    SUBCASE("mean skips nulls; count counts non-nulls of any type") {
        CHECK(run("mean", {{"values", json::array({2, nullptr, 4})}}, ctx()).payload == 3);
        CHECK(run("count", {{"values", json::array({1, nullptr, "x", nullptr, true})}}, ctx())
                  .payload == 3);
        CHECK(run("count", {{"values", json::array()}}, ctx()).payload == 0);
    }
    SUBCASE("rank is 1 + the number of strictly greater values") {
        CHECK(run("rank", {{"values", json::array({63.2, 21.0, 82.5})}, {"query_value", 21.0}},
                  ctx())
                  .payload == 3);
        CHECK(run("rank", {{"values", json::array({63.2, 21.0, 82.5})}, {"query_value", 82.5}},
                  ctx())
                  .payload == 1);
        auto absent = run("rank", {{"values", json::array({1, 2})}, {"query_value", 99}}, ctx());
        CHECK_FALSE(absent.ok);
        CHECK(absent.kind == ErrorKind::NotFound);
    }
    SUBCASE("sort ascending preserves multiplicity") {
        CHECK(run("sort", {{"values", json::array({3, 1, 2, 1})}}, ctx()).payload ==
              json::array({1, 1, 2, 3}));
    }
    SUBCASE("index finds the first semantically equal element") {
        CHECK(run("index", {{"values", json::array({5, 7, 7})}, {"query_value", 7}}, ctx())
                  .payload == 1);
        CHECK(run("index", {{"values", json::array({"Ghana", "France"})},
                            {"query_value", "ghana "}},
                  ctx())
                  .payload == 0);
        CHECK(run("index", {{"values", json::array({5})}, {"query_value", "5"}}, ctx()).payload ==
              0);
        CHECK(run("index", {{"values", json::array({1})}, {"query_value", 9}}, ctx()).kind ==
              ErrorKind::NotFound);
    }
}

TEST_CASE("arithmetic failure modes are typed") {
    auto div0 = run("divide", {{"value_a", 1}, {"value_b", 0}}, ctx());
    CHECK_FALSE(div0.ok);
    CHECK(div0.kind == ErrorKind::ArithmeticError);
    CHECK(div0.message == "ArithmeticError: division by zero (value_b is 0)");

    for (const char* tool : {"add", "multiply", "mean", "maximum", "minimum"}) {
        CAPTURE(tool);
        auto out = run(tool, {{"values", json::array()}}, ctx());
        CHECK_FALSE(out.ok);
        CHECK(out.kind == ErrorKind::ArithmeticError);
    }

    CHECK(run("add", {{"values", json::array({1, nullptr})}}, ctx()).kind ==
          ErrorKind::BadArguments);
    CHECK(run("add", {{"values", json::array({1, "abc"})}}, ctx()).kind ==
          ErrorKind::BadArguments);
    CHECK(run("add", {{"values", 5}}, ctx()).kind == ErrorKind::BadArguments);
    CHECK(run("subtract", {{"value_a", "abc"}, {"value_b", 1}}, ctx()).kind ==
          ErrorKind::BadArguments);
}

TEST_CASE("the dispatcher is total over malformed calls") {
    SUBCASE("unknown tool") {
        auto out = run("frobnicate", json::object(), ctx());
        CHECK_FALSE(out.ok);
        CHECK(out.kind == ErrorKind::UnknownTool);
        CHECK(out.message.find("UnknownTool: ") == 0);
    }
    SUBCASE("argument payload that is not an object") {
        auto out = execute(ToolCall{"t", "add", json::array({1, 2})}, ctx());
        CHECK_FALSE(out.ok);
        CHECK(out.kind == ErrorKind::BadArguments);
    }
    SUBCASE("missing and unexpected arguments") {
        CHECK(run("subtract", {{"value_a", 1}}, ctx()).kind == ErrorKind::BadArguments);
        CHECK(run("subtract", {{"value_a", 1}, {"value_b", 2}, {"value_c", 3}}, ctx()).kind ==
              ErrorKind::BadArguments);
    }
    SUBCASE("nested tool calls are rejected") {
        json nested = {{"values", json::array({1})},
                       {"query_value",
                        {{"name", "retrieve_value"},
                         {"arguments",
                          {{"country_code", "GHA"}, {"indicator_code", "SP.POP.TOTL"},
                           {"year", 2005}}}}}};
        auto out = run("index", nested, ctx());
        CHECK_FALSE(out.ok);
        CHECK(out.kind == ErrorKind::NestedCallRejected);
        CHECK(out.message.find("NestedCallRejected: ") == 0);
    }
    SUBCASE("error lines never exceed 400 characters") {
        auto out = run("get_country_code_from_name",
                       {{"country_name", std::string(2000, 'x')}}, ctx());
        CHECK_FALSE(out.ok);
        CHECK(out.message.size() <= 400);
    }
}

TEST_CASE("utility tools never fail") {
    CHECK(run("think", {{"thought", "step 1: find the code"}}, ctx()).ok);
    CHECK(run("think", json::object(), ctx()).ok);  // even with missing arguments
    CHECK(execute(ToolCall{"t", "think", json(42)}, ctx()).ok);

    auto fa = run("final_answer", {{"answer", 42}}, ctx());
    REQUIRE(fa.ok);
    CHECK(fa.payload == 42);
    auto fa_list = run("final_answer", {{"answer", json::array({"Ghana", "Japan"})}}, ctx());
    CHECK(fa_list.payload == json::array({"Ghana", "Japan"}));
    CHECK(run("final_answer", json::object(), ctx()).payload.is_null());
}

TEST_CASE("data-only mode rejects arithmetic at execution time") {
    auto out = run("add", {{"values", json::array({1, 2})}}, ctx(), ToolMode::DataOnly);
    CHECK_FALSE(out.ok);
    CHECK(out.kind == ErrorKind::UnknownTool);
    CHECK(run("retrieve_value",
              {{"country_code", "GHA"}, {"indicator_code", "SP.POP.TOTL"}, {"year", 2005}},
              ctx(), ToolMode::DataOnly)
              .ok);
    CHECK(run("think", {{"thought", "x"}}, ctx(), ToolMode::DataOnly).ok);
    CHECK(run("final_answer", {{"answer", 1}}, ctx(), ToolMode::DataOnly).ok);
}

TEST_CASE("error kind names round-trip") {
    for (ErrorKind k : {ErrorKind::UnknownTool, ErrorKind::BadArguments, ErrorKind::NotFound,
                        ErrorKind::NoData, ErrorKind::ArithmeticError,
                        ErrorKind::NestedCallRejected}) {
        CHECK(error_kind_from_name(error_kind_name(k)) == k);
    }
    CHECK(error_kind_from_name("garbage") == ErrorKind::BadArguments);
}

TEST_CASE("rendered outcome is the payload dump or the error line") {
    auto ok = run("add", {{"values", json::array({1, 2})}}, ctx());
    CHECK(ok.rendered() == "3");
    auto err = run("divide", {{"value_a", 1}, {"value_b", 0}}, ctx());
    CHECK(err.rendered() == "ArithmeticError: division by zero (value_b is 0)");
}

TEST_CASE("tool laws hold under randomized inputs") {
    Rng rng(2024);
    auto rand_values = [&](std::size_t n) {
        json arr = json::array();
        for (std::size_t i = 0; i < n; ++i)
            arr.push_back((static_cast<double>(rng.uniform(20001)) - 10000.0) / 100.0);
        return arr;
    };

    for (int iter = 0; iter < 100; ++iter) {
        json values = rand_values(2 + rng.uniform(6));
        json shuffled = values;
        {
            std::vector<json> tmp(shuffled.begin(), shuffled.end());
            rng.shuffle(tmp);
            shuffled = json(tmp);
        }

        for (const char* tool : {"add", "multiply", "mean", "maximum", "minimum", "count"}) {
            CAPTURE(tool);
            auto a = run(tool, {{"values", values}}, ctx());
            auto b = run(tool, {{"values", shuffled}}, ctx());
            REQUIRE(a.ok);
            REQUIRE(b.ok);
            CHECK(semantic_eq(a.payload, b.payload));
        }

        const double x = values[0].get<double>(), y = values[1].get<double>();
        CHECK(run("greater_than", {{"value_a", x}, {"value_b", y}}, ctx()).payload ==
              run("less_than", {{"value_a", y}, {"value_b", x}}, ctx()).payload);

        auto sorted = run("sort", {{"values", values}}, ctx());
        REQUIRE(sorted.ok);
        CHECK(semantic_eq(sorted.payload, values));  // multiset preserved
        for (std::size_t i = 1; i < sorted.payload.size(); ++i)
            CHECK(sorted.payload[i - 1].get<double>() <= sorted.payload[i].get<double>());

        // rank(query) == 1 + count of strictly greater values
        const json& q = values[static_cast<std::size_t>(rng.uniform(values.size()))];
        auto rank = run("rank", {{"values", values}, {"query_value", q}}, ctx());
        REQUIRE(rank.ok);
        std::int64_t greater = 0;
        for (const auto& v : values)
            if (v.get<double>() > q.get<double>()) ++greater;
        CHECK(rank.payload.get<std::int64_t>() == 1 + greater);
    }
}
