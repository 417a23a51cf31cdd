#pragma once

#include "wbqa/data_context.hpp"
#include "wbqa/harness.hpp"

#include <iosfwd>
#include <set>
#include <string>
#include <vector>

namespace wbqa {

struct IngestConfig {
    std::string api_base = "https://api.worldbank.org";
    std::string m49_path;  // M49 tabulation CSV
    int year_min = 2003;
    int year_max = 2023;
    int per_page = 1000;        // indicator catalogue paging
    int data_per_page = 20000;  // datum paging
    int max_indicators = 0;     // 0 = all; caps the catalogue for dry runs
    int retries = 3;            // transport retries per request
    std::ostream* log = nullptr;
};

// drop rule for indicators reporting normalised values: a parenthesized unit
// starting with '%' anywhere in the name
bool is_normalized_indicator_name(const std::string& name);
std::vector<IndicatorMeta> filter_indicators(std::vector<IndicatorMeta> catalogue);

std::vector<IndicatorMeta> fetch_featured_indicators(const IngestConfig& cfg);

// only rows whose ISO-3 code is in `countries` are kept (drops aggregates)
ValueTable fetch_indicator_data(const std::string& code, const IngestConfig& cfg,
                                const std::set<std::string>& countries);

struct M49Data {
    std::vector<CountryMeta> countries;
    std::vector<RegionMeta> regions;  // all hierarchy levels
};
M49Data load_region_map(const std::string& path, std::ostream* warnings = nullptr);

// fetch + filter + regions + per-indicator tables, finalized and ready to use
DataContext run_ingest(const IngestConfig& cfg);

// Appendix-style paraphrasing over a chat endpoint
std::string paraphrase_system_prompt();
std::string paraphrase_user_prompt(const IndicatorMeta& indicator);
// semicolon-delimited reply -> exactly 3 distinct non-empty phrases, else empty
std::vector<std::string> parse_paraphrase_reply(const std::string& reply);
// returns the number of indicators that gained paraphrases; failures keep the
// raw name (paraphrases stay empty) and are logged
int paraphrase_catalogue(DataContext& ctx, ChatProvider& provider, int retries = 2,
                         std::ostream* log = nullptr);

}  // namespace wbqa
