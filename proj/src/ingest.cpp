#include "wbqa/ingest.hpp"

#include "wbqa/csv.hpp"
#include "wbqa/http.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace wbqa {

bool is_normalized_indicator_name(const std::string& name) {
    return name.find("(%") != std::string::npos;
}

std::vector<IndicatorMeta> filter_indicators(std::vector<IndicatorMeta> catalogue) {
    std::vector<IndicatorMeta> out;
    for (auto& ind : catalogue)
        if (!is_normalized_indicator_name(ind.name)) out.push_back(std::move(ind));
    return out;
}

namespace {

int json_int(const json& v, const char* what) {
    if (v.is_number_integer()) return v.get<int>();
    if (v.is_number()) return static_cast<int>(v.get<double>());
    if (v.is_string()) {
        try {
            return std::stoi(v.get<std::string>());
        } catch (const std::exception&) {
        }
    }
    throw std::runtime_error(std::string("cannot read integer field ") + what);
}

std::string fetch_body(const std::string& url, int retries) {
    std::string last_error;
    for (int attempt = 0; attempt <= retries; ++attempt) {
        HttpResult res = http_get(url);
        if (!res.ok) {
            last_error = res.error;
            continue;
        }
        if (res.status == 429 || res.status >= 500) {
            last_error = "HTTP " + std::to_string(res.status);
            continue;
        }
        if (res.status < 200 || res.status >= 300)
            throw std::runtime_error("GET " + url + " failed: HTTP " + std::to_string(res.status));
        return res.body;
    }
    throw std::runtime_error("GET " + url + " failed after retries: " + last_error);
}

// World Bank open-data envelope: [page-metadata, rows]; rows may be null when
// the result set is empty
std::pair<int, json> parse_envelope(const std::string& body, const std::string& url) {
    json doc;
    try {
        doc = json::parse(body);
    } catch (const json::exception& e) {
        throw std::runtime_error("unparsable payload from " + url + ": " + e.what());
    }
    if (!doc.is_array() || doc.empty() || !doc[0].is_object())
        throw std::runtime_error("unexpected payload shape from " + url + ": " +
                                 body.substr(0, 200));
    const int pages = doc[0].contains("pages") ? json_int(doc[0]["pages"], "pages") : 1;
    json rows = doc.size() > 1 ? doc[1] : json::array();
    if (rows.is_null()) rows = json::array();
    if (!rows.is_array())
        throw std::runtime_error("unexpected row block from " + url + ": " + body.substr(0, 200));
    return {pages, rows};
}

}  // namespace

std::vector<IndicatorMeta> fetch_featured_indicators(const IngestConfig& cfg) {
    std::vector<IndicatorMeta> out;
    int page = 1, pages = 1;
    while (page <= pages) {
        const std::string url = cfg.api_base + "/v2/indicator?format=json&featured=1&per_page=" +
                                std::to_string(cfg.per_page) + "&page=" + std::to_string(page);
        auto [npages, rows] = parse_envelope(fetch_body(url, cfg.retries), url);
        pages = npages;
        for (const auto& row : rows) {
            if (!row.is_object() || !row.contains("id") || !row.contains("name"))
                throw std::runtime_error("malformed indicator record from " + url + ": " +
                                         row.dump().substr(0, 200));
            IndicatorMeta ind;
            ind.code = row["id"].get<std::string>();
            ind.name = row["name"].get<std::string>();
            if (row.contains("sourceNote") && row["sourceNote"].is_string())
                ind.description = row["sourceNote"].get<std::string>();
            out.push_back(std::move(ind));
        }
        ++page;
    }
    return out;
}

ValueTable fetch_indicator_data(const std::string& code, const IngestConfig& cfg,
                                const std::set<std::string>& countries) {
    ValueTable table;
    table.indicator_code = code;
    int page = 1, pages = 1;
    while (page <= pages) {
        const std::string url = cfg.api_base + "/v2/country/all/indicator/" + code +
                                "?format=json&date=" + std::to_string(cfg.year_min) + ":" +
                                std::to_string(cfg.year_max) +
                                "&per_page=" + std::to_string(cfg.data_per_page) +
                                "&page=" + std::to_string(page);
        auto [npages, rows] = parse_envelope(fetch_body(url, cfg.retries), url);
        pages = npages;
        for (const auto& row : rows) {
            if (!row.is_object()) continue;
            if (!row.contains("value") || row["value"].is_null()) continue;  // missing datum
            if (!row.contains("countryiso3code") || !row["countryiso3code"].is_string()) continue;
            const std::string cc = upper(trim(row["countryiso3code"].get<std::string>()));
            if (!countries.count(cc)) continue;  // aggregates and regions are dropped
            if (!row.contains("date")) continue;
            const int year = json_int(row["date"], "date");
            if (year < cfg.year_min || year > cfg.year_max) continue;
            double value = 0.0;
            if (row["value"].is_number()) {
                value = row["value"].get<double>();
            } else if (row["value"].is_string()) {
                try {
                    value = std::stod(row["value"].get<std::string>());
                } catch (const std::exception&) {
                    continue;
                }
            } else {
                continue;
            }
            if (!std::isfinite(value)) continue;
            table.values[{cc, year}] = value;
        }
        ++page;
    }
    return table;
}

namespace {

std::size_t find_column(const std::vector<std::string>& header, const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (fold(header[i]) == fold(name)) return i;
    return static_cast<std::size_t>(-1);
}

std::string cell(const std::vector<std::string>& row, std::size_t idx) {
    if (idx == static_cast<std::size_t>(-1) || idx >= row.size()) return "";
    return trim(row[idx]);
}

}  // namespace

M49Data load_region_map(const std::string& path, std::ostream* warnings) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open M49 file: " + path);
    std::string header_line;
    if (!std::getline(in, header_line)) throw std::runtime_error("empty M49 file: " + path);
    in.seekg(0);
    const char delim = csv::sniff_delim(header_line);
    auto rows = csv::parse(in, delim);
    if (rows.size() < 2) throw std::runtime_error("M49 file has no data rows: " + path);

    const auto& header = rows[0];
    const std::size_t col_global = find_column(header, "Global Name");
    const std::size_t col_region = find_column(header, "Region Name");
    const std::size_t col_subregion = find_column(header, "Sub-region Name");
    const std::size_t col_intermediate = find_column(header, "Intermediate Region Name");
    const std::size_t col_country = find_column(header, "Country or Area");
    const std::size_t col_iso3 = find_column(header, "ISO-alpha3 Code");
    if (col_country == static_cast<std::size_t>(-1) || col_iso3 == static_cast<std::size_t>(-1))
        throw std::runtime_error("M49 file lacks Country or Area / ISO-alpha3 Code columns: " +
                                 path);

    M49Data data;
    // region name -> (level, member set); insertion order preserved via names list
    std::map<std::string, std::pair<RegionLevel, std::set<std::string>>> region_sets;
    std::vector<std::string> region_order;
    std::set<std::string> seen_codes;

    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        const std::string name = cell(row, col_country);
        const std::string iso3 = upper(cell(row, col_iso3));
        if (name.empty() && iso3.empty()) continue;
        if (iso3.size() != 3 ||
            !std::all_of(iso3.begin(), iso3.end(), [](char c) { return c >= 'A' && c <= 'Z'; })) {
            if (warnings)
                *warnings << "M49 row " << (r + 1) << " skipped: no usable ISO-3 code for '"
                          << name << "' (got '" << cell(row, col_iso3) << "')\n";
            continue;
        }
        if (!seen_codes.insert(iso3).second) continue;
        data.countries.push_back({iso3, name});

        auto add_region = [&](std::size_t col, RegionLevel level) {
            const std::string rname = cell(row, col);
            if (rname.empty()) return;
            auto [it, inserted] = region_sets.try_emplace(rname, level, std::set<std::string>{});
            if (inserted) region_order.push_back(rname);
            it->second.second.insert(iso3);
        };
        add_region(col_global, RegionLevel::Global);
        add_region(col_region, RegionLevel::Region);
        add_region(col_subregion, RegionLevel::SubRegion);
        add_region(col_intermediate, RegionLevel::Intermediate);
    }

    if (data.countries.empty()) throw std::runtime_error("M49 file yielded no countries: " + path);
    for (const auto& rname : region_order) {
        const auto& [level, members] = region_sets.at(rname);
        RegionMeta region;
        region.name = rname;
        region.level = level;
        region.countries.assign(members.begin(), members.end());
        data.regions.push_back(std::move(region));
    }
    return data;
}

DataContext run_ingest(const IngestConfig& cfg) {
    std::ostream& log = cfg.log ? *cfg.log : std::cerr;
    DataContext ctx;
    ctx.year_min = cfg.year_min;
    ctx.year_max = cfg.year_max;

    M49Data m49 = load_region_map(cfg.m49_path, cfg.log);
    ctx.countries = std::move(m49.countries);
    ctx.regions = std::move(m49.regions);
    std::set<std::string> codes;
    for (const auto& c : ctx.countries) codes.insert(c.code);

    auto catalogue = filter_indicators(fetch_featured_indicators(cfg));
    if (cfg.max_indicators > 0 && catalogue.size() > static_cast<std::size_t>(cfg.max_indicators))
        catalogue.resize(static_cast<std::size_t>(cfg.max_indicators));
    ctx.catalogue = std::move(catalogue);
    log << "ingest: " << ctx.catalogue.size() << " indicators after filtering, "
        << ctx.countries.size() << " countries, " << ctx.regions.size() << " regions\n";

    for (const auto& ind : ctx.catalogue) {
        ctx.tables[ind.code] = fetch_indicator_data(ind.code, cfg, codes);
        log << "ingest: " << ind.code << " -> " << ctx.tables[ind.code].values.size()
            << " data points\n";
    }

    ctx.finalize();
    return ctx;
}

std::string paraphrase_system_prompt() {
    return
        "You are a helpful assistant that paraphrases World Bank indicator names using the "
        "context provided in the additional description.\n"
        "Return exactly three clear, concise **noun phrases** that faithfully represent the "
        "meaning of the original indicator name. Output them as a semicolon-delimited list.\n"
        "These noun phrases will be inserted into questions like:\n"
        "- \"Which country in Eastern Europe had the highest <paraphrased indicator name> in "
        "2020?\"\n"
        "- \"Was the average <paraphrased indicator name> in Northern America higher or lower "
        "than the value for Ghana in 2020?\"\n"
        "- \"What was the <paraphrased indicator name> in 2020 for the country with the highest "
        "value in South Asia?\"\n"
        "- \"Did <country> have a higher <paraphrased indicator name> than <other_country> in "
        "2020?\"\n"
        "Write the paraphrases **as if a person were using them to ask a question like the ones "
        "above**. Make them sound **natural and conversational**, like something someone would "
        "realistically say or hear, without compromising technical accuracy.\n"
        "Follow these guidelines:\n"
        "- Make all outputs concise, grammatical, easy to understand and **suitable for "
        "inserting into questions** like these.\n"
        "- Compress the phrase into the **shortest possible form** while retaining the meaning.\n"
        "- Do not use the words **total** or **average** in the paraphrase as this will "
        "interfere with the grammar of the wider questions.\n"
        "- Include bracketed elements, e.g., \"(% of GDP)\" as natural language phrases, such as "
        "\"as a percentage of GDP\".\n"
        "- **Do not include units of measurement**, e.g., \"in US dollars\", or \"in TEUs\".\n"
        "- Avoid embellished and abstract language, or esoteric terms. If an indicator name is "
        "very simple (e.g., 'rural population', 'net migration', 'surface area'), use that as "
        "one of the three paraphrases.\n"
        "- **Only capitalize proper nouns or acronyms**. Even though these are noun phrases, "
        "they will be inserted into the middle of sentences.\n"
        "- Use the additional description only to **clarify meaning**, not to add new "
        "information.\n"
        "- To repeat, paraphrases should be **noun phrases**. Start the phrase with something "
        "like 'count of', 'number of', 'percentage of', 'area of', 'rate of' if you are not sure "
        "how to begin.\n"
        "Reminder: preserve the meaning of the original indicator name; shorten as much as "
        "possible; and do not use unusual phrasing.";
}

std::string paraphrase_user_prompt(const IndicatorMeta& indicator) {
    return "Indicator name: " + indicator.name + "\nDescription: " + indicator.description;
}

std::vector<std::string> parse_paraphrase_reply(const std::string& reply) {
    std::vector<std::string> parts;
    std::stringstream ss(reply);
    std::string item;
    while (std::getline(ss, item, ';')) {
        item = trim(item);
        if (!item.empty()) parts.push_back(item);
    }
    if (parts.size() != 3) return {};
    if (fold(parts[0]) == fold(parts[1]) || fold(parts[0]) == fold(parts[2]) ||
        fold(parts[1]) == fold(parts[2]))
        return {};
    return parts;
}

int paraphrase_catalogue(DataContext& ctx, ChatProvider& provider, int retries,
                         std::ostream* log) {
    int updated = 0;
    // every display name already in use; a paraphrase may repeat its own
    // indicator's raw name but must not collide with anything else
    std::set<std::string> taken;
    for (const auto& ind : ctx.catalogue)
        for (const auto& display : ind.display_names()) taken.insert(fold(display));

    for (auto& ind : ctx.catalogue) {
        std::vector<std::string> phrases;
        std::string last_issue = "no reply";
        for (int attempt = 0; attempt <= retries && phrases.empty(); ++attempt) {
            Message sys;
            sys.role = "system";
            sys.content = paraphrase_system_prompt();
            Message user;
            user.role = "user";
            user.content = paraphrase_user_prompt(ind);
            ChatReply reply = provider.complete({sys, user}, {});
            if (!reply.ok) {
                last_issue = reply.error;
                continue;
            }
            if (!reply.message.content) {
                last_issue = "empty reply content";
                continue;
            }
            phrases = parse_paraphrase_reply(*reply.message.content);
            if (phrases.empty()) {
                last_issue = "reply was not 3 distinct phrases";
                continue;
            }
            for (const auto& p : phrases) {
                const std::string key = fold(p);
                if (taken.count(key) && key != fold(ind.name)) {
                    last_issue = "paraphrase '" + p + "' collides with an existing name";
                    phrases.clear();
                    break;
                }
            }
        }
        if (phrases.empty()) {
            if (log)
                *log << "paraphrase: " << ind.code << " kept raw name (" << last_issue << ")\n";
            continue;
        }
        for (const auto& p : phrases) taken.insert(fold(p));
        ind.paraphrases = std::move(phrases);
        ++updated;
    }
    ctx.finalize();  // paraphrases extend the name index
    return updated;
}

}  // namespace wbqa
