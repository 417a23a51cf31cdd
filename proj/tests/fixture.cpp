#include "fixture.hpp"

#include "wbqa/rng.hpp"

#include <httplib.h>

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace wbqa::fixture {

namespace fs = std::filesystem;

namespace {

struct Datum {
    const char* country;
    int year;
    double value;
};

// 2005..2008, in millions; every per-year column and every per-country
// change column is pairwise distinct
const std::vector<Datum> kPopulation = {
    {"GHA", 2005, 21.0},  {"GHA", 2006, 21.6},  {"GHA", 2007, 22.1},  {"GHA", 2008, 22.7},
    {"FRA", 2005, 63.2},  {"FRA", 2006, 63.6},  {"FRA", 2007, 64.0},  {"FRA", 2008, 64.4},
    {"DEU", 2005, 82.5},  {"DEU", 2006, 82.3},  {"DEU", 2007, 82.1},  {"DEU", 2008, 82.0},
    {"BRA", 2005, 186.1}, {"BRA", 2006, 188.2}, {"BRA", 2007, 190.1}, {"BRA", 2008, 192.0},
    {"JPN", 2005, 127.8}, {"JPN", 2006, 127.9}, {"JPN", 2007, 128.0}, {"JPN", 2008, 127.7},
};

const std::vector<Datum> kAgriLand = {
    {"GHA", 2005, 136.0}, {"GHA", 2006, 137.0}, {"GHA", 2007, 138.5}, {"GHA", 2008, 139.0},
    {"FRA", 2005, 295.2}, {"FRA", 2006, 294.1}, {"FRA", 2007, 293.0}, {"FRA", 2008, 292.4},
    {"DEU", 2005, 169.3}, {"DEU", 2006, 169.0}, {"DEU", 2007, 168.6}, {"DEU", 2008, 168.2},
    {"BRA", 2005, 261.2}, {"BRA", 2006, 263.8}, {"BRA", 2007, 266.1}, {"BRA", 2008, 268.4},
    {"JPN", 2005, 46.2},  {"JPN", 2006, 45.8},  {"JPN", 2007, 45.6},  {"JPN", 2008, 45.3},
};

// two deliberate holes: GHA 2005 and JPN 2007
const std::vector<Datum> kLifeExpectancy = {
    {"GHA", 2006, 60.3},  {"GHA", 2007, 60.8},  {"GHA", 2008, 61.2},
    {"FRA", 2005, 80.15}, {"FRA", 2006, 80.3},  {"FRA", 2007, 80.9},  {"FRA", 2008, 81.15},
    {"DEU", 2005, 79.0},  {"DEU", 2006, 79.4},  {"DEU", 2007, 79.8},  {"DEU", 2008, 80.1},
    {"BRA", 2005, 71.1},  {"BRA", 2006, 71.6},  {"BRA", 2007, 72.1},  {"BRA", 2008, 72.55},
    {"JPN", 2005, 81.9},  {"JPN", 2006, 82.1},  {"JPN", 2008, 82.7},
};

ValueTable table_of(const std::string& code, const std::vector<Datum>& data) {
    ValueTable t;
    t.indicator_code = code;
    for (const auto& d : data) t.values[{d.country, d.year}] = d.value;
    return t;
}

const char* kPopDescription =
    "Total population counts the number of people resident in a country regardless of legal "
    "status or citizenship.";
const char* kAgriDescription =
    "Agricultural land covers the area that is arable, under permanent crops, or under permanent "
    "pasture. Farmland is measured in square kilometres.";
const char* kLifeDescription =
    "Life expectancy at birth indicates the expected lifespan of a newborn infant if prevailing "
    "patterns of mortality were to stay the same throughout its life.";

}  // namespace

DataContext small_context(bool with_paraphrases) {
    DataContext ctx;
    ctx.catalogue = {
        {"SP.POP.TOTL", "Population, total", kPopDescription, {}},
        {"AG.LND.AGRI.K2", "Agricultural land (sq. km)", kAgriDescription, {}},
        {"SP.DYN.LE00.IN", "Life expectancy at birth, total (years)", kLifeDescription, {}},
    };
    if (with_paraphrases) {
        ctx.catalogue[0].paraphrases = {"population size", "number of people",
                                        "resident population"};
        ctx.catalogue[1].paraphrases = {"agricultural land area", "farmland area",
                                        "area of agricultural land"};
        ctx.catalogue[2].paraphrases = {"life expectancy", "life expectancy at birth",
                                        "expected lifespan"};
    }
    ctx.countries = {
        {"GHA", "Ghana"}, {"FRA", "France"}, {"DEU", "Germany"},
        {"BRA", "Brazil"}, {"JPN", "Japan"},
    };
    ctx.regions = {
        {"World", RegionLevel::Global, {"BRA", "DEU", "FRA", "GHA", "JPN"}},
        {"Africa", RegionLevel::Region, {"GHA"}},
        {"Western Africa", RegionLevel::SubRegion, {"GHA"}},
        {"Europe", RegionLevel::Region, {"DEU", "FRA"}},
        {"Western Europe", RegionLevel::SubRegion, {"DEU", "FRA"}},
        {"Americas", RegionLevel::Region, {"BRA"}},
        {"South America", RegionLevel::SubRegion, {"BRA"}},
        {"Asia", RegionLevel::Region, {"JPN"}},
        {"Eastern Asia", RegionLevel::SubRegion, {"JPN"}},
    };
    ctx.tables["SP.POP.TOTL"] = table_of("SP.POP.TOTL", kPopulation);
    ctx.tables["AG.LND.AGRI.K2"] = table_of("AG.LND.AGRI.K2", kAgriLand);
    ctx.tables["SP.DYN.LE00.IN"] = table_of("SP.DYN.LE00.IN", kLifeExpectancy);
    ctx.year_min = 2005;
    ctx.year_max = 2008;
    ctx.finalize();
    return ctx;
}

GenConfig small_gen_config(Availability mode, std::uint64_t seed) {
    GenConfig cfg;
    cfg.mode = mode;
    cfg.seed = seed;
    cfg.region_levels = {RegionLevel::Global, RegionLevel::Region, RegionLevel::SubRegion};
    return cfg;
}

// ---------------------------------------------------------------- scripted

ScriptedProvider::ScriptedProvider(std::vector<ChatReply> replies)
    : replies_(std::move(replies)) {}

ChatReply ScriptedProvider::complete(const std::vector<Message>& messages,
                                     const std::vector<ToolSpec>& tools) {
    seen_messages_.push_back(messages);
    seen_tools_.push_back(tools);
    if (next_ >= replies_.size()) {
        ChatReply r;
        r.ok = false;
        r.error = "scripted provider exhausted after " + std::to_string(replies_.size()) +
                  " replies";
        return r;
    }
    return replies_[next_++];
}

ToolCall call_of(const std::string& name, const json& args, const std::string& id) {
    ToolCall c;
    c.id = id.empty() ? "scripted_" + name : id;
    c.name = name;
    c.args = args;
    return c;
}

ChatReply assistant_calls(std::vector<ToolCall> calls) {
    ChatReply r;
    r.ok = true;
    r.message.role = "assistant";
    r.message.tool_calls = std::move(calls);
    return r;
}

ChatReply assistant_text(const std::string& content) {
    ChatReply r;
    r.ok = true;
    r.message.role = "assistant";
    r.message.content = content;
    return r;
}

// ------------------------------------------------------------- wb mock api

namespace {

struct ServedIndicator {
    std::string id;
    std::string name;
    std::string source_note;
};

json envelope(const json& rows, int page, int per_page) {
    const int total = static_cast<int>(rows.size());
    const int pages = std::max(1, (total + per_page - 1) / per_page);
    json out_rows = json::array();
    const int begin = (page - 1) * per_page;
    for (int i = begin; i < std::min(total, begin + per_page); ++i)
        out_rows.push_back(rows[static_cast<std::size_t>(i)]);
    json meta{{"page", page}, {"pages", pages}, {"per_page", per_page}, {"total", total}};
    return json::array({meta, out_rows.empty() ? json() : json(out_rows)});
}

int query_int(const httplib::Request& req, const char* key, int fallback) {
    if (!req.has_param(key)) return fallback;
    try {
        return std::stoi(req.get_param_value(key));
    } catch (...) {
        return fallback;
    }
}

struct ServerRunner {
    httplib::Server server;
    std::thread thread;
    int port = 0;

    void start() {
        port = server.bind_to_any_port("127.0.0.1");
        if (port <= 0) throw std::runtime_error("fixture server could not bind a port");
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }
    void stop() {
        server.stop();
        if (thread.joinable()) thread.join();
    }
};

}  // namespace

struct WbApiServer::Impl {
    ServerRunner runner;
    std::atomic<int> requests{0};
    int fail_first = 0;

    json indicator_rows;
    std::map<std::string, json> data_rows;  // indicator code -> rows
};

WbApiServer::WbApiServer(int fail_first) : impl_(new Impl) {
    impl_->fail_first = fail_first;

    const std::vector<ServedIndicator> served = {
        {"SP.POP.TOTL", "Population, total", kPopDescription},
        {"AG.LND.AGRI.ZS", "Agricultural land (% of land area)",
         "Share of land area that is agricultural."},
        {"AG.LND.AGRI.K2", "Agricultural land (sq. km)", kAgriDescription},
        {"SE.SEC.ENRR", "School enrollment, secondary (% gross)",
         "Gross secondary enrollment ratio."},
        {"SP.DYN.LE00.IN", "Life expectancy at birth, total (years)", kLifeDescription},
    };
    impl_->indicator_rows = json::array();
    for (const auto& ind : served)
        impl_->indicator_rows.push_back(
            json{{"id", ind.id}, {"name", ind.name}, {"sourceNote", ind.source_note}});

    auto rows_of = [](const std::vector<Datum>& data) {
        json rows = json::array();
        for (const auto& d : data)
            rows.push_back(json{{"countryiso3code", d.country},
                                {"date", std::to_string(d.year)},
                                {"value", d.value}});
        return rows;
    };
    json pop_rows = rows_of(kPopulation);
    // noise ingestion must skip: an aggregate code, a null datum, a year
    // outside the requested window
    pop_rows.push_back(json{{"countryiso3code", "ZZZ"}, {"date", "2006"}, {"value", 1.0}});
    pop_rows.push_back(json{{"countryiso3code", "FRA"}, {"date", "2006"}, {"value", nullptr}});
    pop_rows.push_back(json{{"countryiso3code", "GHA"}, {"date", "1999"}, {"value", 5.0}});
    impl_->data_rows["SP.POP.TOTL"] = pop_rows;
    impl_->data_rows["AG.LND.AGRI.K2"] = rows_of(kAgriLand);
    impl_->data_rows["SP.DYN.LE00.IN"] = rows_of(kLifeExpectancy);
    // the normalized indicators still serve data; ingestion must never ask
    impl_->data_rows["AG.LND.AGRI.ZS"] = json::array();
    impl_->data_rows["SE.SEC.ENRR"] = json::array();

    auto gate = [impl = impl_.get()](httplib::Response& res) {
        const int n = ++impl->requests;
        if (n <= impl->fail_first) {
            res.status = 503;
            res.set_content("try later", "text/plain");
            return false;
        }
        return true;
    };

    impl_->runner.server.Get("/v2/indicator", [impl = impl_.get(), gate](const httplib::Request& req,
                                                                         httplib::Response& res) {
        if (!gate(res)) return;
        const int page = query_int(req, "page", 1);
        const int per_page = query_int(req, "per_page", 50);
        res.set_content(envelope(impl->indicator_rows, page, per_page).dump(), "application/json");
    });
    impl_->runner.server.Get(R"(/v2/country/all/indicator/([A-Za-z0-9.]+))",
                             [impl = impl_.get(), gate](const httplib::Request& req,
                                                        httplib::Response& res) {
                                 if (!gate(res)) return;
                                 const std::string code = req.matches[1];
                                 auto it = impl->data_rows.find(code);
                                 if (it == impl->data_rows.end()) {
                                     res.status = 404;
                                     res.set_content("no such indicator", "text/plain");
                                     return;
                                 }
                                 const int page = query_int(req, "page", 1);
                                 const int per_page = query_int(req, "per_page", 1000);
                                 res.set_content(envelope(it->second, page, per_page).dump(),
                                                 "application/json");
                             });
    impl_->runner.start();
}

WbApiServer::~WbApiServer() { impl_->runner.stop(); }

std::string WbApiServer::base_url() const {
    return "http://127.0.0.1:" + std::to_string(impl_->runner.port);
}

int WbApiServer::request_count() const { return impl_->requests.load(); }

// -------------------------------------------------------- oracle chat mock

namespace {

const std::map<std::string, std::string>& paraphrase_replies() {
    static const std::map<std::string, std::string> replies = {
        {"Population, total", "total population; resident population count; number of people"},
        {"Agricultural land (sq. km)",
         "agricultural land area; farmland area; total farmland of a country"},
        {"Life expectancy at birth, total (years)",
         "life expectancy at birth; expected lifespan of a newborn; years a newborn can expect "
         "to live"},
    };
    return replies;
}

json assistant_wire(const json& message) {
    return json{{"id", "cmpl-fixture"},
                {"object", "chat.completion"},
                {"choices", json::array({json{{"index", 0}, {"message", message}}})}};
}

json tool_call_wire(const std::string& id, const std::string& name, const json& args) {
    return json{{"id", id},
                {"type", "function"},
                {"function", json{{"name", name}, {"arguments", args.dump()}}}};
}

}  // namespace

struct OracleChatServer::Impl {
    ServerRunner runner;
    std::mutex mutex;
    std::map<std::string, const QuestionInstance*> by_text;
    std::vector<QuestionInstance> gold;
};

OracleChatServer::OracleChatServer() : impl_(new Impl) {
    impl_->runner.server.Post(
        "/v1/chat/completions",
        [impl = impl_.get()](const httplib::Request& req, httplib::Response& res) {
            json body;
            try {
                body = json::parse(req.body);
            } catch (const std::exception&) {
                res.status = 400;
                res.set_content("bad json", "text/plain");
                return;
            }
            const json& messages = body.at("messages");

            std::string first_user;
            int assistant_turns = 0;
            for (const auto& m : messages) {
                const std::string role = m.value("role", "");
                if (role == "user" && first_user.empty() && m["content"].is_string())
                    first_user = m["content"].get<std::string>();
                if (role == "assistant") ++assistant_turns;
            }

            // paraphrase requests carry no tools and name the indicator
            if (first_user.rfind("Indicator name: ", 0) == 0) {
                const std::size_t eol = first_user.find('\n');
                const std::string name = first_user.substr(16, eol - 16);
                auto it = paraphrase_replies().find(name);
                if (it == paraphrase_replies().end()) {
                    res.status = 400;
                    res.set_content("unknown indicator: " + name, "text/plain");
                    return;
                }
                res.set_content(
                    assistant_wire(json{{"role", "assistant"}, {"content", it->second}}).dump(),
                    "application/json");
                return;
            }

            const QuestionInstance* q = nullptr;
            {
                std::lock_guard<std::mutex> lock(impl->mutex);
                auto it = impl->by_text.find(first_user);
                if (it != impl->by_text.end()) q = it->second;
            }
            if (!q) {
                res.status = 400;
                res.set_content("unknown question: " + first_user, "text/plain");
                return;
            }

            json reply{{"role", "assistant"}, {"content", nullptr}};
            const auto& patterns = q->essential.patterns;
            if (assistant_turns < static_cast<int>(patterns.size())) {
                const auto& p = patterns[static_cast<std::size_t>(assistant_turns)];
                reply["tool_calls"] = json::array(
                    {tool_call_wire("call_" + std::to_string(assistant_turns + 1), p.tool,
                                    p.args)});
            } else {
                reply["tool_calls"] = json::array(
                    {tool_call_wire("call_final", "final_answer", json{{"answer", q->answer}})});
            }
            res.set_content(assistant_wire(reply).dump(), "application/json");
        });
    impl_->runner.start();
}

OracleChatServer::~OracleChatServer() { impl_->runner.stop(); }

void OracleChatServer::load_gold(const std::vector<QuestionInstance>& dataset) {
    std::lock_guard<std::mutex> lock(impl_->mutex);
    impl_->gold = dataset;
    impl_->by_text.clear();
    for (const auto& q : impl_->gold) impl_->by_text.emplace(q.text, &q);
}

std::string OracleChatServer::base_url() const {
    return "http://127.0.0.1:" + std::to_string(impl_->runner.port) + "/v1";
}

// ------------------------------------------------------------------- files

void write_m49_csv(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    out << "Global Code,Global Name,Region Code,Region Name,Sub-region Code,Sub-region Name,"
           "Intermediate Region Code,Intermediate Region Name,Country or Area,M49 Code,"
           "ISO-alpha3 Code\n";
    out << "001,World,002,Africa,011,Western Africa,,,Ghana,288,GHA\n";
    out << "001,World,150,Europe,155,Western Europe,,,France,250,FRA\n";
    out << "001,World,150,Europe,155,Western Europe,,,Germany,276,DEU\n";
    out << "001,World,019,Americas,005,South America,,,Brazil,076,BRA\n";
    out << "001,World,142,Asia,030,Eastern Asia,,,Japan,392,JPN\n";
    // malformed ISO code: must be skipped with a warning, not ingested
    out << "001,World,150,Europe,154,Northern Europe,,,Sark,680,x99\n";
}

TempDir::TempDir(const std::string& tag) {
    static std::atomic<unsigned> counter{0};
    const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    const fs::path base = fs::temp_directory_path() /
                          ("wbqa-" + tag + "-" + std::to_string(stamp) + "-" +
                           std::to_string(counter.fetch_add(1)));
    fs::create_directories(base);
    path_ = base.string();
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
}

std::string TempDir::file(const std::string& name) const {
    return (fs::path(path_) / name).string();
}

}  // namespace wbqa::fixture
