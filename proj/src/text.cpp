#include "fewlabel/text.hpp"

#include <cctype>
#include <regex>

namespace fewlabel {
namespace {

// One-byte placeholders used between the replacement and lowercasing passes.
// They cannot appear in real input (stripped up front), so restoring them to
// the sentinel words at the end is unambiguous.
constexpr char kUrlMark = '\x01';
constexpr char kEmailMark = '\x02';

const std::regex& url_pattern() {
    static const std::regex re(R"((?:[A-Za-z][A-Za-z0-9+.\-]*://|www\.)\S*)",
                               std::regex::ECMAScript | std::regex::icase | std::regex::optimize);
    return re;
}

const std::regex& email_pattern() {
    static const std::regex re(R"([^\s@]+@[^\s@]+\.[A-Za-z]{2,})",
                               std::regex::ECMAScript | std::regex::optimize);
    return re;
}

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

// Replaces every match with a one-byte marker, padding with spaces where the
// match touches non-whitespace so the marker always ends up its own word.
std::string mark_matches(const std::string& text, const std::regex& re, char marker) {
    std::string out;
    out.reserve(text.size());
    std::size_t last = 0;
    for (auto it = std::sregex_iterator(text.begin(), text.end(), re);
         it != std::sregex_iterator(); ++it) {
        const auto pos = static_cast<std::size_t>(it->position());
        const auto len = static_cast<std::size_t>(it->length());
        out.append(text, last, pos - last);
        if (!out.empty() && !is_space(out.back())) out.push_back(' ');
        out.push_back(marker);
        last = pos + len;
        if (last < text.size() && !is_space(text[last])) out.push_back(' ');
    }
    out.append(text, last, std::string::npos);
    return out;
}

std::string collapse_digit_runs(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        if (std::isdigit(static_cast<unsigned char>(text[i]))) {
            out.push_back('0');
            while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
        } else {
            out.push_back(text[i]);
            ++i;
        }
    }
    return out;
}

bool is_sentinel_word(const std::string& s, std::size_t begin, std::size_t end) {
    const std::size_t n = end - begin;
    return (n == 3 && s.compare(begin, 3, kUrlToken) == 0) ||
           (n == 5 && s.compare(begin, 5, kEmailToken) == 0);
}

// ASCII plus the Latin-1 supplement (covers Portuguese accented capitals,
// 0xC380-0xC39E except the multiplication sign); other code points pass through.
void lowercase_word_utf8(std::string& s, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
        const auto c = static_cast<unsigned char>(s[i]);
        if (c >= 'A' && c <= 'Z') {
            s[i] = static_cast<char>(c + 32);
        } else if (c == 0xC3 && i + 1 < end) {
            const auto d = static_cast<unsigned char>(s[i + 1]);
            if (d >= 0x80 && d <= 0x9E && d != 0x97) s[i + 1] = static_cast<char>(d + 0x20);
            ++i;
        }
    }
}

} // namespace

std::string normalize_text(const std::string& text) {
    std::string s;
    s.reserve(text.size());
    for (char c : text) s.push_back((c == kUrlMark || c == kEmailMark) ? ' ' : c);

    s = mark_matches(s, url_pattern(), kUrlMark);
    s = mark_matches(s, email_pattern(), kEmailMark);
    s = collapse_digit_runs(s);

    // Lowercase word by word; words already equal to a sentinel are kept
    // verbatim, which is what makes re-normalizing processed text a no-op.
    std::size_t i = 0;
    while (i < s.size()) {
        if (is_space(s[i])) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < s.size() && !is_space(s[j])) ++j;
        if (!is_sentinel_word(s, i, j)) lowercase_word_utf8(s, i, j);
        i = j;
    }

    std::string out;
    out.reserve(s.size() + 8);
    for (char c : s) {
        if (c == kUrlMark) {
            out.append(kUrlToken);
        } else if (c == kEmailMark) {
            out.append(kEmailToken);
        } else {
            out.push_back(c);
        }
    }
    return out;
}

std::vector<std::string> tokenize(const std::string& normalized) {
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        if (!current.empty()) {
            tokens.push_back(current);
            current.clear();
        }
    };
    for (char ch : normalized) {
        const auto c = static_cast<unsigned char>(ch);
        if (c < 0x80 && std::isspace(c)) {
            flush();
        } else if (c < 0x80 && std::ispunct(c)) {
            flush();
            tokens.emplace_back(1, ch);
        } else {
            current.push_back(ch);
        }
    }
    flush();
    return tokens;
}

std::string detokenize(const std::vector<std::string>& tokens) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) out.push_back(' ');
        out.append(tokens[i]);
    }
    return out;
}

} // namespace fewlabel
