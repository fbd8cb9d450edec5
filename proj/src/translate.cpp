#include "fewlabel/translate.hpp"

#include <cstdlib>
#include <sstream>

#include "fewlabel/errors.hpp"

namespace fewlabel {

MockTranslator::MockTranslator(std::map<std::string, std::string> forward,
                               std::map<std::string, std::string> backward,
                               std::string pivot_lang)
    : forward_(std::move(forward)), backward_(std::move(backward)), pivot_lang_(std::move(pivot_lang)) {}

std::string MockTranslator::translate(const std::string& text,
                                      const std::string& source_lang,
                                      const std::string& target_lang) const {
    if (source_lang == target_lang) return text;
    const auto& mapping = (target_lang == pivot_lang_) ? forward_ : backward_;
    std::istringstream in(text);
    std::string word;
    std::string out;
    while (in >> word) {
        auto it = mapping.find(word);
        if (!out.empty()) out.push_back(' ');
        out += (it == mapping.end()) ? word : it->second;
    }
    return out;
}

std::unique_ptr<Translator> translator_from_env(const std::string& endpoint_override) {
    std::string endpoint = endpoint_override;
    if (endpoint.empty()) {
        const char* env = std::getenv("TRANSLATOR_ENDPOINT");
        if (env != nullptr) endpoint = env;
    }
    if (endpoint.empty()) {
        throw DataError("no translator endpoint: set TRANSLATOR_ENDPOINT or pass --endpoint");
    }
    std::string key;
    if (const char* env = std::getenv("TRANSLATOR_KEY")) key = env;
    return std::make_unique<HttpTranslator>(endpoint, key);
}

} // namespace fewlabel
