#pragma once

#include <string>
#include <utility>
#include <vector>

namespace wbqa {

using HttpHeaders = std::vector<std::pair<std::string, std::string>>;

struct HttpResult {
    bool ok = false;    // transport-level success; inspect status for HTTP errors
    int status = 0;
    std::string body;
    std::string error;  // transport error description when !ok
};

// "http://host:1234/some/base" -> origin "http://host:1234", prefix "/some/base"
struct UrlParts {
    std::string origin;
    std::string prefix;
};
UrlParts split_url(const std::string& url);

// one client per call, so callers may issue requests from many threads
HttpResult http_get(const std::string& url, const HttpHeaders& headers = {}, int timeout_sec = 60);
HttpResult http_post_json(const std::string& url, const std::string& body,
                          const HttpHeaders& headers = {}, int timeout_sec = 300);

// whether https:// URLs are supported by this build (TLS compiled in)
bool https_supported();

}  // namespace wbqa
