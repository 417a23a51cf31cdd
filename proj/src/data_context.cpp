#include "wbqa/data_context.hpp"

#include "wbqa/csv.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>

namespace fs = std::filesystem;

namespace wbqa {

std::vector<std::string> IndicatorMeta::display_names() const {
    std::vector<std::string> out{name};
    out.insert(out.end(), paraphrases.begin(), paraphrases.end());
    return out;
}

std::string region_level_name(RegionLevel level) {
    switch (level) {
        case RegionLevel::Global: return "global";
        case RegionLevel::Region: return "region";
        case RegionLevel::SubRegion: return "subregion";
        case RegionLevel::Intermediate: return "intermediate";
    }
    return "region";
}

std::optional<RegionLevel> region_level_from_name(const std::string& name) {
    const std::string f = fold(name);
    if (f == "global") return RegionLevel::Global;
    if (f == "region") return RegionLevel::Region;
    if (f == "subregion" || f == "sub-region") return RegionLevel::SubRegion;
    if (f == "intermediate") return RegionLevel::Intermediate;
    return std::nullopt;
}

static bool valid_country_code(const std::string& code) {
    if (code.size() != 3) return false;
    return std::all_of(code.begin(), code.end(),
                       [](unsigned char c) { return c >= 'A' && c <= 'Z'; });
}

void DataContext::finalize() {
    indicator_code_idx_.clear();
    indicator_name_idx_.clear();
    country_code_idx_.clear();
    country_name_idx_.clear();
    region_name_idx_.clear();

    for (std::size_t i = 0; i < catalogue.size(); ++i) {
        auto& ind = catalogue[i];
        if (ind.code.empty()) throw std::runtime_error("indicator with empty code: '" + ind.name + "'");
        if (!indicator_code_idx_.emplace(ind.code, i).second)
            throw std::runtime_error("duplicate indicator code: " + ind.code);
        if (!ind.paraphrases.empty() && ind.paraphrases.size() != 3)
            throw std::runtime_error("indicator " + ind.code + " must carry 0 or 3 paraphrases");
        std::set<std::string> seen;
        for (const auto& p : ind.paraphrases) {
            if (p.empty()) throw std::runtime_error("indicator " + ind.code + " has an empty paraphrase");
            if (!seen.insert(fold(p)).second)
                throw std::runtime_error("indicator " + ind.code + " has duplicate paraphrases");
        }
        for (const auto& display : ind.display_names()) {
            auto [it, inserted] = indicator_name_idx_.emplace(fold(display), i);
            // an indicator may repeat its own raw name as a paraphrase, but a
            // display name must never resolve to two different indicators
            if (!inserted && it->second != i)
                throw std::runtime_error("display name '" + display + "' is ambiguous between " +
                                         catalogue[it->second].code + " and " + ind.code);
        }
    }

    for (std::size_t i = 0; i < countries.size(); ++i) {
        auto& c = countries[i];
        if (!valid_country_code(c.code))
            throw std::runtime_error("bad country code: '" + c.code + "'");
        if (!country_code_idx_.emplace(c.code, i).second)
            throw std::runtime_error("duplicate country code: " + c.code);
        if (!country_name_idx_.emplace(fold(c.name), i).second)
            throw std::runtime_error("duplicate country name: " + c.name);
    }

    for (std::size_t i = 0; i < regions.size(); ++i) {
        auto& r = regions[i];
        std::sort(r.countries.begin(), r.countries.end());
        r.countries.erase(std::unique(r.countries.begin(), r.countries.end()), r.countries.end());
        if (!region_name_idx_.emplace(fold(r.name), i).second)
            throw std::runtime_error("duplicate region name: " + r.name);
        for (const auto& code : r.countries)
            if (!country_code_idx_.count(code))
                throw std::runtime_error("region " + r.name + " references unknown country " + code);
    }

    for (auto& [code, table] : tables) {
        if (!indicator_code_idx_.count(code))
            throw std::runtime_error("value table for unknown indicator " + code);
        if (table.indicator_code != code)
            throw std::runtime_error("value table code mismatch for " + code);
        for (auto& [key, value] : table.values) {
            if (!std::isfinite(value))
                throw std::runtime_error("non-finite value for " + code + "/" + key.first);
            if (year_min && (key.second < year_min || key.second > year_max))
                throw std::runtime_error("out-of-range year for " + code + "/" + key.first + ": " +
                                         std::to_string(key.second));
        }
    }

    for (const auto& [alias, canonical] : aliases)
        if (!country_name_idx_.count(fold(canonical)))
            throw std::runtime_error("alias '" + alias + "' targets unknown country '" + canonical + "'");
}

const IndicatorMeta* DataContext::indicator_by_code(const std::string& code) const {
    auto it = indicator_code_idx_.find(upper(trim(code)));
    return it == indicator_code_idx_.end() ? nullptr : &catalogue[it->second];
}

const IndicatorMeta* DataContext::indicator_by_name(const std::string& name) const {
    auto it = indicator_name_idx_.find(fold(name));
    return it == indicator_name_idx_.end() ? nullptr : &catalogue[it->second];
}

const CountryMeta* DataContext::country_by_code(const std::string& code) const {
    auto it = country_code_idx_.find(upper(trim(code)));
    return it == country_code_idx_.end() ? nullptr : &countries[it->second];
}

const CountryMeta* DataContext::country_by_name(const std::string& name) const {
    std::string f = fold(name);
    auto alias = aliases.find(f);
    if (alias != aliases.end()) f = fold(alias->second);
    auto it = country_name_idx_.find(f);
    return it == country_name_idx_.end() ? nullptr : &countries[it->second];
}

const RegionMeta* DataContext::region_by_name(const std::string& name) const {
    auto it = region_name_idx_.find(fold(name));
    return it == region_name_idx_.end() ? nullptr : &regions[it->second];
}

LookupResult DataContext::lookup_value(const std::string& country_code,
                                       const std::string& indicator_code, int year) const {
    if (!indicator_by_code(indicator_code)) return {LookupStatus::UnknownIndicator, 0.0};
    if (!country_by_code(country_code)) return {LookupStatus::UnknownCountry, 0.0};
    auto table = tables.find(upper(trim(indicator_code)));
    if (table == tables.end()) return {LookupStatus::Missing, 0.0};
    auto it = table->second.values.find({upper(trim(country_code)), year});
    if (it == table->second.values.end()) return {LookupStatus::Missing, 0.0};
    return {LookupStatus::Found, it->second};
}

// --- persistence ---

static void require_header(const std::vector<std::vector<std::string>>& rows,
                           const std::vector<std::string>& expected, const std::string& file) {
    if (rows.empty() || rows[0] != expected)
        throw std::runtime_error(file + ": unexpected header");
}

void persist_context(const DataContext& ctx, const std::string& dir) {
    fs::create_directories(dir);
    auto open = [&](const std::string& name) {
        std::ofstream out(fs::path(dir) / name, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + name + " in " + dir);
        return out;
    };

    {
        auto out = open("indicators.csv");
        csv::write_row(out, {"code", "name", "description", "paraphrase_1", "paraphrase_2", "paraphrase_3"});
        for (const auto& ind : ctx.catalogue) {
            std::vector<std::string> row{ind.code, ind.name, ind.description, "", "", ""};
            for (std::size_t i = 0; i < ind.paraphrases.size() && i < 3; ++i)
                row[3 + i] = ind.paraphrases[i];
            csv::write_row(out, row);
        }
    }
    {
        auto out = open("countries.csv");
        csv::write_row(out, {"code", "name"});
        for (const auto& c : ctx.countries) csv::write_row(out, {c.code, c.name});
    }
    {
        auto out = open("regions.csv");
        csv::write_row(out, {"region", "level", "country_code"});
        for (const auto& r : ctx.regions)
            for (const auto& code : r.countries)
                csv::write_row(out, {r.name, region_level_name(r.level), code});
    }
    {
        auto out = open("aliases.csv");
        csv::write_row(out, {"alias", "canonical_name"});
        for (const auto& [alias, canonical] : ctx.aliases) csv::write_row(out, {alias, canonical});
    }
    {
        auto out = open("years.csv");
        csv::write_row(out, {"year_min", "year_max"});
        csv::write_row(out, {std::to_string(ctx.year_min), std::to_string(ctx.year_max)});
    }
    for (const auto& [code, table] : ctx.tables) {
        auto out = open(code + ".csv");
        csv::write_row(out, {"country_code", "year", "value"});
        for (const auto& [key, value] : table.values)
            csv::write_row(out, {key.first, std::to_string(key.second), json(value).dump()});
    }
}

DataContext load_context(const std::string& dir) {
    DataContext ctx;
    auto path = [&](const std::string& name) { return (fs::path(dir) / name).string(); };

    {
        auto rows = csv::parse_file(path("years.csv"));
        require_header(rows, {"year_min", "year_max"}, "years.csv");
        if (rows.size() != 2 || rows[1].size() != 2) throw std::runtime_error("years.csv: bad row");
        ctx.year_min = std::stoi(rows[1][0]);
        ctx.year_max = std::stoi(rows[1][1]);
    }
    {
        auto rows = csv::parse_file(path("countries.csv"));
        require_header(rows, {"code", "name"}, "countries.csv");
        for (std::size_t i = 1; i < rows.size(); ++i) {
            if (rows[i].size() != 2)
                throw std::runtime_error("countries.csv: bad row at line " + std::to_string(i + 1));
            ctx.countries.push_back({rows[i][0], rows[i][1]});
        }
    }
    {
        auto rows = csv::parse_file(path("regions.csv"));
        require_header(rows, {"region", "level", "country_code"}, "regions.csv");
        std::map<std::string, std::size_t> seen;
        for (std::size_t i = 1; i < rows.size(); ++i) {
            if (rows[i].size() != 3)
                throw std::runtime_error("regions.csv: bad row at line " + std::to_string(i + 1));
            auto level = region_level_from_name(rows[i][1]);
            if (!level)
                throw std::runtime_error("regions.csv: unknown level '" + rows[i][1] + "' at line " +
                                         std::to_string(i + 1));
            auto it = seen.find(rows[i][0]);
            if (it == seen.end()) {
                seen.emplace(rows[i][0], ctx.regions.size());
                ctx.regions.push_back({rows[i][0], *level, {rows[i][2]}});
            } else {
                ctx.regions[it->second].countries.push_back(rows[i][2]);
            }
        }
    }
    {
        auto rows = csv::parse_file(path("aliases.csv"));
        require_header(rows, {"alias", "canonical_name"}, "aliases.csv");
        for (std::size_t i = 1; i < rows.size(); ++i) {
            if (rows[i].size() != 2)
                throw std::runtime_error("aliases.csv: bad row at line " + std::to_string(i + 1));
            ctx.aliases[fold(rows[i][0])] = rows[i][1];
        }
    }
    {
        auto rows = csv::parse_file(path("indicators.csv"));
        require_header(rows, {"code", "name", "description", "paraphrase_1", "paraphrase_2", "paraphrase_3"},
                       "indicators.csv");
        for (std::size_t i = 1; i < rows.size(); ++i) {
            if (rows[i].size() != 6)
                throw std::runtime_error("indicators.csv: bad row at line " + std::to_string(i + 1));
            IndicatorMeta ind{rows[i][0], rows[i][1], rows[i][2], {}};
            if (!rows[i][3].empty() || !rows[i][4].empty() || !rows[i][5].empty())
                ind.paraphrases = {rows[i][3], rows[i][4], rows[i][5]};
            ctx.catalogue.push_back(std::move(ind));
        }
    }
    for (const auto& ind : ctx.catalogue) {
        const std::string file = ind.code + ".csv";
        if (!fs::exists(fs::path(dir) / file))
            throw std::runtime_error("missing value table for indicator " + ind.code);
        auto rows = csv::parse_file(path(file));
        require_header(rows, {"country_code", "year", "value"}, file);
        ValueTable table{ind.code, {}};
        for (std::size_t i = 1; i < rows.size(); ++i) {
            if (rows[i].size() != 3)
                throw std::runtime_error(file + ": bad row at line " + std::to_string(i + 1));
            table.values[{rows[i][0], std::stoi(rows[i][1])}] = std::stod(rows[i][2]);
        }
        ctx.tables.emplace(ind.code, std::move(table));
    }
    ctx.finalize();
    return ctx;
}

bool context_equal(const DataContext& a, const DataContext& b) {
    return a.catalogue == b.catalogue && a.countries == b.countries && a.regions == b.regions &&
           a.tables == b.tables && a.aliases == b.aliases && a.year_min == b.year_min &&
           a.year_max == b.year_max;
}

}  // namespace wbqa
