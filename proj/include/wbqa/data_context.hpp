#pragma once

#include "wbqa/util.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace wbqa {

struct IndicatorMeta {
    std::string code;
    std::string name;
    std::string description;
    std::vector<std::string> paraphrases;  // empty or exactly 3

    // the names under which this indicator may be referred to in a question
    std::vector<std::string> display_names() const;
    bool operator==(const IndicatorMeta&) const = default;
};

struct CountryMeta {
    std::string code;  // ISO-3, [A-Z]{3}
    std::string name;
    bool operator==(const CountryMeta&) const = default;
};

enum class RegionLevel { Global, Region, SubRegion, Intermediate };
std::string region_level_name(RegionLevel level);
std::optional<RegionLevel> region_level_from_name(const std::string& name);

struct RegionMeta {
    std::string name;
    RegionLevel level = RegionLevel::Region;
    std::vector<std::string> countries;  // ISO-3 codes, kept sorted
    bool operator==(const RegionMeta&) const = default;
};

struct ValueTable {
    std::string indicator_code;
    std::map<std::pair<std::string, int>, double> values;  // (country code, year) -> value
    bool operator==(const ValueTable&) const = default;
};

enum class LookupStatus { Found, Missing, UnknownIndicator, UnknownCountry };
struct LookupResult {
    LookupStatus status = LookupStatus::Missing;
    double value = 0.0;
};

struct DataContext {
    std::vector<IndicatorMeta> catalogue;
    std::vector<CountryMeta> countries;
    std::vector<RegionMeta> regions;
    std::map<std::string, ValueTable> tables;
    std::map<std::string, std::string> aliases;  // folded alias -> canonical country name
    int year_min = 0;
    int year_max = 0;

    // builds lookup indices and validates invariants; must be called after
    // the fields are populated and before any lookups
    void finalize();

    const IndicatorMeta* indicator_by_code(const std::string& code) const;
    // matches the raw name or any paraphrase, case-folded
    const IndicatorMeta* indicator_by_name(const std::string& name) const;
    const CountryMeta* country_by_code(const std::string& code) const;
    // canonical names and aliases, case-folded
    const CountryMeta* country_by_name(const std::string& name) const;
    const RegionMeta* region_by_name(const std::string& name) const;

    LookupResult lookup_value(const std::string& country_code,
                              const std::string& indicator_code, int year) const;

private:
    std::map<std::string, std::size_t> indicator_code_idx_;
    std::map<std::string, std::size_t> indicator_name_idx_;  // folded
    std::map<std::string, std::size_t> country_code_idx_;
    std::map<std::string, std::size_t> country_name_idx_;  // folded
    std::map<std::string, std::size_t> region_name_idx_;   // folded
};

// CSV layout under dir: indicators.csv, countries.csv, regions.csv,
// aliases.csv, years.csv, and one <code>.csv per indicator
void persist_context(const DataContext& ctx, const std::string& dir);
DataContext load_context(const std::string& dir);

bool context_equal(const DataContext& a, const DataContext& b);

}  // namespace wbqa
