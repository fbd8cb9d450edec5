#include "fewlabel/tfidf.hpp"

#include <cmath>
#include <unordered_set>

#include "fewlabel/errors.hpp"

namespace fewlabel {

double TfIdfTable::idf(const std::string& token) const {
    auto it = df.find(token);
    if (it == df.end()) throw DataError("tf-idf: unknown token: " + token);
    return std::log(static_cast<double>(doc_count) / static_cast<double>(it->second));
}

TfIdfTable compute_tfidf(const std::vector<TokenizedDoc>& corpus) {
    if (corpus.empty()) throw DataError("compute_tfidf: empty corpus");
    TfIdfTable table;
    table.doc_count = static_cast<long long>(corpus.size());
    std::unordered_set<std::string> seen;
    for (const auto& doc : corpus) {
        seen.clear();
        for (const auto& t : doc.tokens) {
            if (seen.insert(t).second) ++table.df[t];
        }
    }
    return table;
}

double tfidf_score(const std::string& token, const TokenizedDoc& doc, const TfIdfTable& table) {
    const double idf = table.idf(token); // validates the token first
    long long count = 0;
    for (const auto& t : doc.tokens) {
        if (t == token) ++count;
    }
    if (doc.tokens.empty()) throw DataError("tf-idf: empty document: " + doc.id);
    const double tf = static_cast<double>(count) / static_cast<double>(doc.tokens.size());
    return tf * idf;
}

std::vector<double> tfidf_doc_scores(const TokenizedDoc& doc, const TfIdfTable& table) {
    if (doc.tokens.empty()) throw DataError("tf-idf: empty document: " + doc.id);
    std::unordered_map<std::string, long long> counts;
    for (const auto& t : doc.tokens) ++counts[t];
    const double len = static_cast<double>(doc.tokens.size());
    std::vector<double> scores;
    scores.reserve(doc.tokens.size());
    for (const auto& t : doc.tokens) {
        scores.push_back(static_cast<double>(counts[t]) / len * table.idf(t));
    }
    return scores;
}

} // namespace fewlabel
