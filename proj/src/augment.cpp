#include "fewlabel/augment.hpp"

#include <algorithm>
#include <cmath>

#include "fewlabel/errors.hpp"
#include "fewlabel/rng.hpp"
#include "fewlabel/text.hpp"

namespace fewlabel {

namespace {

void validate_config(const AugmentConfig& c) {
    if (!(c.p_max >= 0.0 && c.p_max <= 1.0)) throw DataError("augment: p_max must be in [0, 1]");
    if (!(c.pool_fraction > 0.0 && c.pool_fraction <= 1.0)) {
        throw DataError("augment: pool_fraction must be in (0, 1]");
    }
}

} // namespace

std::vector<std::string> replacement_pool(const Vocabulary& vocab, const TfIdfTable& table,
                                          double pool_fraction) {
    if (!(pool_fraction > 0.0 && pool_fraction <= 1.0)) {
        throw DataError("augment: pool_fraction must be in (0, 1]");
    }
    if (vocab.size() == 0) throw DataError("augment: empty vocabulary");

    std::vector<std::pair<double, std::string>> scored;
    scored.reserve(vocab.tokens.size());
    for (const auto& token : vocab.tokens) {
        scored.emplace_back(table.idf(token), token);
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first < b.first;
        return a.second < b.second;
    });

    const auto pool_size = static_cast<std::size_t>(
        std::ceil(pool_fraction * static_cast<double>(scored.size())));
    if (pool_size == 0) throw DataError("augment: empty replacement pool");

    std::vector<std::string> pool;
    pool.reserve(pool_size);
    for (std::size_t i = 0; i < pool_size; ++i) pool.push_back(std::move(scored[i].second));
    return pool;
}

TokenizedDoc tfidf_replace_with_pool(const TokenizedDoc& doc, const TfIdfTable& table,
                                     const std::vector<std::string>& pool,
                                     const AugmentConfig& config) {
    validate_config(config);
    if (pool.empty()) throw DataError("augment: empty replacement pool");
    const auto scores = tfidf_doc_scores(doc, table);
    const double hi = *std::max_element(scores.begin(), scores.end());
    const double lo = *std::min_element(scores.begin(), scores.end());

    TokenizedDoc out;
    out.id = doc.id + "#aug";
    out.label = doc.label;
    out.tokens = doc.tokens;

    Rng rng(derive_seed(config.seed, doc.id));
    for (std::size_t i = 0; i < out.tokens.size(); ++i) {
        // Low-scored (uninformative) positions are the most likely to change.
        const double p = (hi == lo) ? 0.0 : config.p_max * (hi - scores[i]) / (hi - lo);
        const double u = rng.next_real();
        if (u < p) out.tokens[i] = pool[rng.next_index(pool.size())];
    }
    return out;
}

TokenizedDoc tfidf_replace(const TokenizedDoc& doc, const TfIdfTable& table,
                           const Vocabulary& vocab, const AugmentConfig& config) {
    validate_config(config);
    return tfidf_replace_with_pool(doc, table, replacement_pool(vocab, table, config.pool_fraction),
                                   config);
}

std::vector<TokenizedDoc> back_translate(const std::vector<TokenizedDoc>& docs,
                                         const Translator& translator,
                                         const std::string& source_lang,
                                         const std::string& pivot_lang) {
    if (source_lang == pivot_lang) throw DataError("back-translation: source and pivot language are equal");
    std::vector<TokenizedDoc> out;
    out.reserve(docs.size());
    for (const auto& doc : docs) {
        const std::string original = detokenize(doc.tokens);
        std::string round_tripped;
        try {
            const std::string pivoted = translator.translate(original, source_lang, pivot_lang);
            round_tripped = translator.translate(pivoted, pivot_lang, source_lang);
        } catch (const DataError& e) {
            throw DataError("back-translation failed for document " + doc.id + ": " + e.what());
        }
        TokenizedDoc aug;
        aug.id = doc.id + "#bt";
        aug.label = doc.label;
        aug.tokens = tokenize(normalize_text(round_tripped));
        if (aug.tokens.empty()) {
            throw DataError("back-translation produced empty text for document " + doc.id);
        }
        out.push_back(std::move(aug));
    }
    return out;
}

Dataset augment_dataset(const Dataset& dataset, AugmentStrategy strategy,
                        const AugmentDeps& deps, const AugmentConfig& config) {
    validate_config(config);
    Dataset out;
    out.classes = dataset.classes;
    out.docs = dataset.docs;
    out.docs.reserve(dataset.docs.size() * 2);

    if (strategy == AugmentStrategy::TfIdfReplace) {
        if (deps.table == nullptr || deps.vocab == nullptr) {
            throw DataError("augment: tf-idf replacement needs a table and a vocabulary");
        }
        const auto pool = replacement_pool(*deps.vocab, *deps.table, config.pool_fraction);
        for (const auto& doc : dataset.docs) {
            out.docs.push_back(tfidf_replace_with_pool(doc, *deps.table, pool, config));
        }
    } else {
        if (deps.translator == nullptr) throw DataError("augment: back-translation needs a translator");
        auto augmented =
            back_translate(dataset.docs, *deps.translator, deps.source_lang, deps.pivot_lang);
        for (auto& doc : augmented) out.docs.push_back(std::move(doc));
    }
    return out;
}

} // namespace fewlabel
