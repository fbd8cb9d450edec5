#include "fewlabel/predictor.hpp"

#include "fewlabel/errors.hpp"
#include "fewlabel/text.hpp"

namespace fewlabel {

Predictor::Predictor(const std::string& model_path) : saved_(load_model(model_path)) {
    const std::string& kind = saved_.featurizer.kind;
    if (kind == "avg_embeddings") {
        if (saved_.featurizer.embeddings.empty()) {
            throw DataError(model_path + ": featurizer names no embedding file");
        }
        embeddings_ = load_embeddings(saved_.featurizer.embeddings);
        if (embeddings_.dim() != model_dim(saved_.model)) {
            throw DataError(model_path + ": embedding dim " + std::to_string(embeddings_.dim()) +
                            " does not match model dim " + std::to_string(model_dim(saved_.model)));
        }
    } else if (kind == "layers") {
        throw DataError(model_path +
                        ": model was trained on precomputed layer features; raw text cannot be "
                        "featurized for it");
    } else {
        throw DataError(model_path + ": no featurizer recorded; cannot score raw text");
    }
}

const std::vector<std::string>& Predictor::classes() const { return model_classes(saved_.model); }

int Predictor::num_classes() const { return static_cast<int>(classes().size()); }

PredRanking Predictor::rank(const std::string& id, const std::string& text) const {
    if (text.empty()) throw DataError("predict: empty text");
    const std::vector<std::string> tokens = tokenize(normalize_text(text));
    const Eigen::VectorXd vec = doc_vector(tokens, embeddings_);
    Eigen::MatrixXd row(1, vec.size());
    row.row(0) = vec.transpose();
    const Eigen::MatrixXd scores = model_scores(saved_.model, row);
    return make_ranking(id, classes(), scores.row(0).transpose());
}

} // namespace fewlabel
