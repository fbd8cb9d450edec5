#include "fewlabel/vocab.hpp"

#include <algorithm>

#include "fewlabel/errors.hpp"

namespace fewlabel {

Vocabulary build_vocab(const std::vector<TokenizedDoc>& corpus, int min_count) {
    if (corpus.empty()) throw DataError("build_vocab: empty corpus");
    if (min_count < 1) throw DataError("build_vocab: min_count must be >= 1");

    std::unordered_map<std::string, long long> counts;
    for (const auto& doc : corpus) {
        for (const auto& t : doc.tokens) ++counts[t];
    }

    std::vector<std::pair<std::string, long long>> kept;
    kept.reserve(counts.size());
    for (const auto& [token, count] : counts) {
        if (count >= min_count) kept.emplace_back(token, count);
    }
    if (kept.empty()) {
        throw DataError("build_vocab: no token appears at least " + std::to_string(min_count) + " times");
    }
    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    Vocabulary v;
    v.min_count = min_count;
    v.tokens.reserve(kept.size());
    v.counts.reserve(kept.size());
    for (std::size_t i = 0; i < kept.size(); ++i) {
        v.index.emplace(kept[i].first, static_cast<int>(i));
        v.tokens.push_back(std::move(kept[i].first));
        v.counts.push_back(kept[i].second);
    }
    return v;
}

} // namespace fewlabel
