#include "wbqa/http.hpp"

#include <httplib.h>

namespace wbqa {

UrlParts split_url(const std::string& url) {
    UrlParts parts;
    auto scheme_end = url.find("://");
    std::size_t host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
    auto path_start = url.find('/', host_start);
    if (path_start == std::string::npos) {
        parts.origin = url;
        parts.prefix = "";
    } else {
        parts.origin = url.substr(0, path_start);
        parts.prefix = url.substr(path_start);
    }
    while (!parts.prefix.empty() && parts.prefix.back() == '/') parts.prefix.pop_back();
    return parts;
}

bool https_supported() {
#ifdef CPPHTTPLIB_OPENSSL_SUPPORT
    return true;
#else
    return false;
#endif
}

namespace {

HttpResult request(const std::string& url, const HttpHeaders& headers, int timeout_sec,
                   const std::string* post_body) {
    UrlParts parts = split_url(url);
    HttpResult out;
    if (parts.origin.rfind("https://", 0) == 0 && !https_supported()) {
        out.error = "https requested but TLS support is not compiled in";
        return out;
    }
    httplib::Client cli(parts.origin);
    cli.set_connection_timeout(timeout_sec);
    cli.set_read_timeout(timeout_sec);
    cli.set_write_timeout(timeout_sec);
    cli.set_follow_location(true);
    httplib::Headers h;
    for (const auto& [k, v] : headers) h.emplace(k, v);

    const std::string path = parts.prefix.empty() ? "/" : parts.prefix;
    httplib::Result res = post_body ? cli.Post(path, h, *post_body, "application/json")
                                    : cli.Get(path, h);
    if (!res) {
        out.error = httplib::to_string(res.error());
        return out;
    }
    out.ok = true;
    out.status = res->status;
    out.body = res->body;
    return out;
}

}  // namespace

HttpResult http_get(const std::string& url, const HttpHeaders& headers, int timeout_sec) {
    return request(url, headers, timeout_sec, nullptr);
}

HttpResult http_post_json(const std::string& url, const std::string& body,
                          const HttpHeaders& headers, int timeout_sec) {
    return request(url, headers, timeout_sec, &body);
}

}  // namespace wbqa
