#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fewlabel {

// One raw JSONL record as found on disk.
struct RawRecord {
    std::string id;
    std::string text;
    std::optional<std::string> label;
};

// A document after normalization and tokenization. Tokens are never empty and
// contain no whitespace.
struct TokenizedDoc {
    std::string id;
    std::vector<std::string> tokens;
    std::optional<std::string> label;
};

struct Dataset {
    std::vector<TokenizedDoc> docs;
    std::vector<std::string> classes; // sorted, unique, covers every non-null label
};

TokenizedDoc make_doc(const RawRecord& record);

// Derives the sorted class list from the documents' labels.
Dataset make_dataset(std::vector<TokenizedDoc> docs);

// Reads JSONL records {"id","text","label"|null}, normalizes and tokenizes.
// Malformed lines, empty ids/texts and duplicate ids raise DataError with the
// offending line number; require_labels additionally rejects null labels.
Dataset load_dataset(const std::string& path, bool require_labels = false);

// Writes one {"id","text","label"} line per document, text re-joined from tokens.
void save_dataset(const Dataset& dataset, const std::string& path);

struct SplitSpec {
    int train_n = 0; // per-class counts
    int valid_n = 0;
    int test_n = 0;
    std::uint64_t seed = 0;
};

struct SplitResult {
    Dataset train;
    Dataset valid;
    Dataset test;
};

// Per-class sampling without replacement: every class contributes exactly
// train_n/valid_n/test_n documents to the three splits. Unlabeled documents
// are ignored. Classes with fewer than the required total raise DataError
// naming every deficient class.
SplitResult stratified_split(const Dataset& dataset, const SplitSpec& spec);

} // namespace fewlabel
