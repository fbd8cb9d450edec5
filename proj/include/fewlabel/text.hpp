#pragma once

#include <string>
#include <vector>

namespace fewlabel {

// Sentinel tokens for stripped URLs and e-mail addresses. They stay uppercase
// so they can never collide with a natural (lowercased) word.
inline constexpr const char* kUrlToken = "URL";
inline constexpr const char* kEmailToken = "EMAIL";

// Lowercases (ASCII + Latin-1 supplement), replaces URLs/e-mails with the
// sentinel tokens above and collapses digit runs to a single "0". Idempotent:
// normalize_text(normalize_text(x)) == normalize_text(x).
std::string normalize_text(const std::string& text);

// Splits on whitespace; each ASCII punctuation character becomes its own
// token. Bytes >= 0x80 count as word characters, so UTF-8 sequences survive.
std::vector<std::string> tokenize(const std::string& normalized);

// Joins tokens with single spaces.
std::string detokenize(const std::vector<std::string>& tokens);

} // namespace fewlabel
