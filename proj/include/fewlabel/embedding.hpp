#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fewlabel/dataset.hpp"
#include "fewlabel/vocab.hpp"

namespace fewlabel {

struct SkipGramConfig {
    int dim = 600;
    int window = 10;
    int min_count = 5;
    int negatives = 5;
    int epochs = 5;
    double learning_rate = 0.025;
    std::uint64_t seed = 1;
};

// Word vectors are kept in single precision: the text interchange format
// carries 9 significant digits, which round-trips a float exactly. Training
// arithmetic still runs in double and is cast once at the end.
struct EmbeddingMatrix {
    Vocabulary vocab;
    Eigen::MatrixXf vectors; // one row per vocabulary entry

    int dim() const { return static_cast<int>(vectors.cols()); }
};

// Loss and gradients for one (center, context, negatives) triple:
//   loss = -ln sigma(u_c . v_w) - sum_n ln sigma(-u_n . v_w)
struct SgnsPairGrad {
    double loss = 0.0;
    Eigen::VectorXd d_center;
    Eigen::VectorXd d_context;
    std::vector<Eigen::VectorXd> d_negatives;
};

SgnsPairGrad sgns_pair_loss_grad(const Eigen::VectorXd& center,
                                 const Eigen::VectorXd& context,
                                 const std::vector<Eigen::VectorXd>& negatives);

// Skip-gram with negative sampling. Negatives are drawn from the unigram
// distribution raised to 0.75; vectors start uniform in [-0.5/dim, 0.5/dim)
// and the learning rate decays linearly to a 1e-4 floor. Fully deterministic
// for a given seed.
EmbeddingMatrix train_skipgram(const std::vector<TokenizedDoc>& corpus, const SkipGramConfig& config);

// Mean of the vectors of in-vocabulary tokens; the zero vector when none match.
Eigen::VectorXd doc_vector(const std::vector<std::string>& tokens, const EmbeddingMatrix& embeddings);

// Text format: "V dim" header, then one "token x1 ... xdim" line per entry
// with 9 significant digits per value (exact float round-trip).
void write_embeddings(const EmbeddingMatrix& embeddings, const std::string& path);
EmbeddingMatrix load_embeddings(const std::string& path);

} // namespace fewlabel
