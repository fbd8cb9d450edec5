#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "fewlabel/dataset.hpp"

namespace fewlabel {

// Token inventory ordered by (count desc, token asc); index 0 is the most
// frequent token. counts[i] is the corpus frequency of tokens[i].
struct Vocabulary {
    std::vector<std::string> tokens;
    std::vector<long long> counts;
    std::unordered_map<std::string, int> index;
    int min_count = 1;

    int size() const { return static_cast<int>(tokens.size()); }

    // Index of the token, or -1 when absent.
    int index_of(const std::string& token) const {
        auto it = index.find(token);
        return it == index.end() ? -1 : it->second;
    }
};

// Counts tokens over the corpus and keeps those seen at least min_count times.
// Raises DataError on an empty corpus or when nothing survives the cut.
Vocabulary build_vocab(const std::vector<TokenizedDoc>& corpus, int min_count);

} // namespace fewlabel
