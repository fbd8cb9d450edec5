#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fewlabel/dataset.hpp"
#include "fewlabel/tfidf.hpp"
#include "fewlabel/translate.hpp"
#include "fewlabel/vocab.hpp"

namespace fewlabel {

struct AugmentConfig {
    double p_max = 0.3;         // replacement probability for the lowest-scored position
    double pool_fraction = 0.5; // fraction of the vocabulary eligible as replacements
    std::uint64_t seed = 0;
};

// Replacement candidates: the ceil(pool_fraction * |V|) vocabulary tokens with
// the lowest idf (least informative), ordered by (idf asc, token asc).
std::vector<std::string> replacement_pool(const Vocabulary& vocab, const TfIdfTable& table,
                                          double pool_fraction);

// Uninformative-word replacement: position i is replaced with probability
//   p_i = p_max * (C - s_i) / (C - m)
// where s_i is the tf-idf score at i and C/m are the per-document max/min
// (all p_i = 0 when C == m). Replacements are drawn uniformly from `pool`.
// Seeded per document from (config.seed, doc.id); the output id gains "#aug".
TokenizedDoc tfidf_replace_with_pool(const TokenizedDoc& doc, const TfIdfTable& table,
                                     const std::vector<std::string>& pool,
                                     const AugmentConfig& config);

// Convenience wrapper that derives the pool from (vocab, table) itself.
TokenizedDoc tfidf_replace(const TokenizedDoc& doc, const TfIdfTable& table,
                           const Vocabulary& vocab, const AugmentConfig& config);

// source -> pivot -> source round trip through the translator; output ids gain
// "#bt". Documents keep their labels. Any translator failure aborts the whole
// batch (no partial output).
std::vector<TokenizedDoc> back_translate(const std::vector<TokenizedDoc>& docs,
                                         const Translator& translator,
                                         const std::string& source_lang,
                                         const std::string& pivot_lang);

enum class AugmentStrategy { TfIdfReplace, BackTranslation };

struct AugmentDeps {
    // TfIdfReplace:
    const TfIdfTable* table = nullptr;
    const Vocabulary* vocab = nullptr;
    // BackTranslation:
    const Translator* translator = nullptr;
    std::string source_lang = "pt";
    std::string pivot_lang = "en";
};

// Emits every original document followed by exactly one synthetic counterpart
// per original, doubling the dataset. Labels and the class list are preserved.
Dataset augment_dataset(const Dataset& dataset, AugmentStrategy strategy,
                        const AugmentDeps& deps, const AugmentConfig& config);

} // namespace fewlabel
