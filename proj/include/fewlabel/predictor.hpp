#pragma once

#include <string>

#include "fewlabel/embedding.hpp"
#include "fewlabel/metrics.hpp"
#include "fewlabel/model_io.hpp"

namespace fewlabel {

// A loaded model plus everything needed to turn raw text into its feature
// vector. Immutable after construction; safe to share across threads.
class Predictor {
public:
    // Loads the model file and the embedding artifact its featurizer names.
    // Models trained on precomputed layer features (or with no recorded
    // featurizer) cannot score raw text and are rejected here.
    explicit Predictor(const std::string& model_path);

    const std::vector<std::string>& classes() const;
    int num_classes() const;

    // Full ranking over all classes for one document; id is echoed back.
    PredRanking rank(const std::string& id, const std::string& text) const;

private:
    SavedModel saved_;
    EmbeddingMatrix embeddings_;
};

} // namespace fewlabel
