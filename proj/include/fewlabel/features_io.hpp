#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "fewlabel/linear.hpp"

namespace fewlabel {

// How document vectors were produced, carried alongside features and inside
// saved models so `predict` can featurize raw text the same way.
struct FeaturizerInfo {
    std::string kind = "none"; // "avg_embeddings", "layers" or "none"
    std::string embeddings;    // path to the embedding file (avg_embeddings)
    std::string strategy;      // layer selection name (layers)
};

// A featurized dataset: one JSONL row {"id","label","vector"} per document,
// label null for unlabeled docs, plus a "<path>.meta.json" sidecar recording
// dim and the featurizer.
struct FeatureFile {
    std::vector<std::string> ids;
    std::vector<std::string> labels; // empty string marks an unlabeled doc
    std::vector<bool> labeled;
    Eigen::MatrixXd rows;
    FeaturizerInfo featurizer;
};

void write_features(const std::string& path, const FeatureFile& features);

// Reads the JSONL and its sidecar; a missing sidecar degrades to featurizer
// "none" rather than failing, so hand-made feature files still train.
FeatureFile load_features(const std::string& path);

// Dense training view: requires every doc labeled; classes are the sorted
// distinct labels.
FeatureMatrix to_feature_matrix(const FeatureFile& features);

} // namespace fewlabel
