#pragma once

#include <map>
#include <memory>
#include <string>

namespace fewlabel {

// Machine-translation backend used by back-translation augmentation.
class Translator {
public:
    virtual ~Translator() = default;

    virtual std::string translate(const std::string& text,
                                  const std::string& source_lang,
                                  const std::string& target_lang) const = 0;
};

// Deterministic word-by-word mapper for tests and offline runs. Translating
// into `pivot_lang` applies the forward map, translating out of it applies the
// backward map; words missing from a map pass through unchanged, so the
// default-constructed instance is the identity translator.
class MockTranslator : public Translator {
public:
    MockTranslator() = default;
    MockTranslator(std::map<std::string, std::string> forward,
                   std::map<std::string, std::string> backward,
                   std::string pivot_lang = "en");

    std::string translate(const std::string& text,
                          const std::string& source_lang,
                          const std::string& target_lang) const override;

private:
    std::map<std::string, std::string> forward_;
    std::map<std::string, std::string> backward_;
    std::string pivot_lang_ = "en";
};

// HTTP client for a LibreTranslate-style endpoint: POST {"q","source","target"}
// returning {"translatedText": ...}. The endpoint is a full URL such as
// "http://host:5000/translate"; api_key, when non-empty, is sent as "api_key".
class HttpTranslator : public Translator {
public:
    explicit HttpTranslator(std::string endpoint, std::string api_key = "",
                            int timeout_seconds = 30);

    std::string translate(const std::string& text,
                          const std::string& source_lang,
                          const std::string& target_lang) const override;

private:
    std::string base_;
    std::string path_;
    std::string api_key_;
    int timeout_seconds_;
};

// Builds an HttpTranslator from TRANSLATOR_ENDPOINT / TRANSLATOR_KEY; DataError
// when the endpoint variable is unset and no explicit endpoint is given.
std::unique_ptr<Translator> translator_from_env(const std::string& endpoint_override = "");

} // namespace fewlabel
