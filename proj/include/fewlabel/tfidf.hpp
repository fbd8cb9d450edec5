#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "fewlabel/dataset.hpp"

namespace fewlabel {

// Document frequencies over a fixed corpus. idf uses the unsmoothed form
// ln(N / df), so a token present in every document scores exactly 0.
struct TfIdfTable {
    long long doc_count = 0;
    std::unordered_map<std::string, long long> df;

    bool contains(const std::string& token) const { return df.count(token) != 0; }

    // ln(doc_count / df(token)); DataError for tokens never seen at build time.
    double idf(const std::string& token) const;
};

TfIdfTable compute_tfidf(const std::vector<TokenizedDoc>& corpus);

// tf(token, doc) * idf(token) with tf = occurrences / document length.
// The token must be known to the table, but need not occur in the document
// (score 0 in that case).
double tfidf_score(const std::string& token, const TokenizedDoc& doc, const TfIdfTable& table);

// Score of the token at every position of the document, in document order.
std::vector<double> tfidf_doc_scores(const TokenizedDoc& doc, const TfIdfTable& table);

} // namespace fewlabel
