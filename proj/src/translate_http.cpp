// HttpTranslator lives in its own translation unit so the bundled HTTP client
// header is compiled only where networking is actually used.
#include "fewlabel/http.hpp"
#include <json.hpp>

#include "fewlabel/errors.hpp"
#include "fewlabel/translate.hpp"

namespace fewlabel {

namespace {

// Splits "http://host:port/some/path" into client base and request path.
std::pair<std::string, std::string> split_endpoint(const std::string& endpoint) {
    const auto scheme_end = endpoint.find("://");
    if (scheme_end == std::string::npos) {
        throw DataError("translator endpoint must include a scheme: " + endpoint);
    }
    const auto path_start = endpoint.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {endpoint, "/translate"};
    return {endpoint.substr(0, path_start), endpoint.substr(path_start)};
}

} // namespace

HttpTranslator::HttpTranslator(std::string endpoint, std::string api_key, int timeout_seconds)
    : api_key_(std::move(api_key)), timeout_seconds_(timeout_seconds) {
    auto [base, path] = split_endpoint(endpoint);
    base_ = std::move(base);
    path_ = std::move(path);
}

std::string HttpTranslator::translate(const std::string& text,
                                      const std::string& source_lang,
                                      const std::string& target_lang) const {
    nlohmann::json body;
    body["q"] = text;
    body["source"] = source_lang;
    body["target"] = target_lang;
    if (!api_key_.empty()) body["api_key"] = api_key_;

    httplib::Client client(base_);
    client.set_connection_timeout(timeout_seconds_, 0);
    client.set_read_timeout(timeout_seconds_, 0);
    auto res = client.Post(path_, body.dump(), "application/json");
    if (!res) {
        throw DataError("translator request to " + base_ + path_ + " failed: " +
                        httplib::to_string(res.error()));
    }
    if (res->status < 200 || res->status >= 300) {
        throw DataError("translator returned HTTP " + std::to_string(res->status) +
                        ": " + res->body);
    }
    nlohmann::json parsed = nlohmann::json::parse(res->body, nullptr, false);
    if (parsed.is_discarded() || !parsed.contains("translatedText") ||
        !parsed["translatedText"].is_string()) {
        throw DataError("translator returned an unexpected payload: " + res->body);
    }
    return parsed["translatedText"].get<std::string>();
}

} // namespace fewlabel
