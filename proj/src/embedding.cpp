#include "fewlabel/embedding.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "fewlabel/errors.hpp"
#include "fewlabel/io.hpp"
#include "fewlabel/rng.hpp"

namespace fewlabel {

namespace {

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// ln sigma(x), computed without overflow on either tail.
double log_sigmoid(double x) {
    if (x >= 0.0) return -std::log1p(std::exp(-x));
    return x - std::log1p(std::exp(x));
}

void validate_config(const SkipGramConfig& c) {
    if (c.dim < 1) throw DataError("skip-gram: dim must be >= 1");
    if (c.window < 1) throw DataError("skip-gram: window must be >= 1");
    if (c.min_count < 1) throw DataError("skip-gram: min_count must be >= 1");
    if (c.negatives < 0) throw DataError("skip-gram: negatives must be >= 0");
    if (c.epochs < 0) throw DataError("skip-gram: epochs must be >= 0");
    if (!(c.learning_rate > 0.0)) throw DataError("skip-gram: learning_rate must be > 0");
}

} // namespace

SgnsPairGrad sgns_pair_loss_grad(const Eigen::VectorXd& center,
                                 const Eigen::VectorXd& context,
                                 const std::vector<Eigen::VectorXd>& negatives) {
    if (context.size() != center.size()) throw DataError("sgns: dimension mismatch");
    SgnsPairGrad g;
    const double s = context.dot(center);
    const double sig = sigmoid(s);
    g.loss = -log_sigmoid(s);
    g.d_center = -(1.0 - sig) * context;
    g.d_context = -(1.0 - sig) * center;
    g.d_negatives.reserve(negatives.size());
    for (const auto& neg : negatives) {
        if (neg.size() != center.size()) throw DataError("sgns: dimension mismatch");
        const double sn = neg.dot(center);
        const double sign = sigmoid(sn);
        g.loss += -log_sigmoid(-sn);
        g.d_center += sign * neg;
        g.d_negatives.push_back(sign * center);
    }
    return g;
}

EmbeddingMatrix train_skipgram(const std::vector<TokenizedDoc>& corpus, const SkipGramConfig& config) {
    validate_config(config);
    Vocabulary vocab = build_vocab(corpus, config.min_count);
    const int V = vocab.size();
    const int dim = config.dim;

    std::vector<std::vector<int>> encoded;
    encoded.reserve(corpus.size());
    long long total_tokens = 0;
    for (const auto& doc : corpus) {
        std::vector<int> ids;
        ids.reserve(doc.tokens.size());
        for (const auto& t : doc.tokens) {
            const int idx = vocab.index_of(t);
            if (idx >= 0) ids.push_back(idx);
        }
        total_tokens += static_cast<long long>(ids.size());
        encoded.push_back(std::move(ids));
    }

    Rng rng(config.seed);
    Eigen::MatrixXd in(V, dim), out(V, dim);
    for (int i = 0; i < V; ++i) {
        for (int j = 0; j < dim; ++j) in(i, j) = (rng.next_real() - 0.5) / dim;
    }
    for (int i = 0; i < V; ++i) {
        for (int j = 0; j < dim; ++j) out(i, j) = (rng.next_real() - 0.5) / dim;
    }

    // Cumulative unigram^0.75 table for negative sampling.
    std::vector<double> cum(V);
    double total_weight = 0.0;
    for (int i = 0; i < V; ++i) {
        total_weight += std::pow(static_cast<double>(vocab.counts[i]), 0.75);
        cum[i] = total_weight;
    }
    auto draw_negative = [&]() {
        const double u = rng.next_real() * total_weight;
        const auto it = std::upper_bound(cum.begin(), cum.end(), u);
        return static_cast<int>(std::min<std::ptrdiff_t>(it - cum.begin(), V - 1));
    };

    const long long total_updates = std::max<long long>(1, config.epochs * total_tokens);
    long long processed = 0;
    std::vector<int> negs;
    std::vector<Eigen::VectorXd> neg_vecs;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        for (const auto& sent : encoded) {
            const int len = static_cast<int>(sent.size());
            for (int t = 0; t < len; ++t) {
                const double progress = static_cast<double>(processed) / static_cast<double>(total_updates);
                const double alpha = config.learning_rate * std::max(1e-4, 1.0 - progress);
                ++processed;
                const int center = sent[t];
                for (int off = -config.window; off <= config.window; ++off) {
                    if (off == 0) continue;
                    const int pos = t + off;
                    if (pos < 0 || pos >= len) continue;
                    const int ctx = sent[pos];

                    negs.clear();
                    for (int k = 0; k < config.negatives; ++k) {
                        const int n = draw_negative();
                        if (n != ctx) negs.push_back(n);
                    }
                    neg_vecs.clear();
                    for (int n : negs) neg_vecs.push_back(out.row(n).transpose());

                    const Eigen::VectorXd vw = in.row(center).transpose();
                    const Eigen::VectorXd uc = out.row(ctx).transpose();
                    const SgnsPairGrad g = sgns_pair_loss_grad(vw, uc, neg_vecs);

                    in.row(center) -= alpha * g.d_center.transpose();
                    out.row(ctx) -= alpha * g.d_context.transpose();
                    for (std::size_t k = 0; k < negs.size(); ++k) {
                        out.row(negs[k]) -= alpha * g.d_negatives[k].transpose();
                    }
                }
            }
        }
    }

    EmbeddingMatrix emb;
    emb.vocab = std::move(vocab);
    emb.vectors = in.cast<float>();
    return emb;
}

Eigen::VectorXd doc_vector(const std::vector<std::string>& tokens, const EmbeddingMatrix& embeddings) {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(embeddings.dim());
    long long matched = 0;
    for (const auto& t : tokens) {
        const int idx = embeddings.vocab.index_of(t);
        if (idx >= 0) {
            acc += embeddings.vectors.row(idx).cast<double>().transpose();
            ++matched;
        }
    }
    if (matched > 0) acc /= static_cast<double>(matched);
    return acc;
}

void write_embeddings(const EmbeddingMatrix& embeddings, const std::string& path) {
    const int V = embeddings.vocab.size();
    const int dim = embeddings.dim();
    if (static_cast<int>(embeddings.vectors.rows()) != V) {
        throw DataError("write_embeddings: vocabulary/matrix size mismatch");
    }
    std::string out;
    out.reserve(static_cast<std::size_t>(V) * (dim * 12 + 16) + 16);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%d %d\n", V, dim);
    out += buf;
    for (int i = 0; i < V; ++i) {
        out += embeddings.vocab.tokens[i];
        for (int j = 0; j < dim; ++j) {
            std::snprintf(buf, sizeof buf, " %.9g", static_cast<double>(embeddings.vectors(i, j)));
            out += buf;
        }
        out += '\n';
    }
    write_text_file(path, out);
}

EmbeddingMatrix load_embeddings(const std::string& path) {
    const auto lines = read_lines(path);
    if (lines.empty()) throw DataError(path + ": empty embedding file");

    auto fail = [&](std::size_t line, const std::string& msg) -> DataError {
        return DataError(path + ":" + std::to_string(line + 1) + ": " + msg);
    };

    int V = 0, dim = 0;
    {
        char extra;
        if (std::sscanf(lines[0].c_str(), "%d %d %c", &V, &dim, &extra) != 2 || V < 1 || dim < 1) {
            throw fail(0, "malformed header, expected \"<count> <dim>\"");
        }
    }

    EmbeddingMatrix emb;
    emb.vocab.min_count = 0;
    emb.vectors.resize(V, dim);
    int row = 0;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::string& line = lines[i];
        if (line.empty()) continue;
        if (row >= V) throw fail(i, "more vectors than the header declares");

        const char* p = line.c_str();
        const char* token_end = p;
        while (*token_end && !std::isspace(static_cast<unsigned char>(*token_end))) ++token_end;
        std::string token(p, token_end);
        if (token.empty()) throw fail(i, "missing token");
        if (!emb.vocab.index.emplace(token, row).second) throw fail(i, "duplicate token " + token);
        emb.vocab.tokens.push_back(std::move(token));
        emb.vocab.counts.push_back(0);

        const char* cursor = token_end;
        for (int j = 0; j < dim; ++j) {
            char* next = nullptr;
            const float value = std::strtof(cursor, &next);
            if (next == cursor) throw fail(i, "expected " + std::to_string(dim) + " values");
            if (!std::isfinite(value)) throw fail(i, "non-finite value");
            emb.vectors(row, j) = value;
            cursor = next;
        }
        while (*cursor && std::isspace(static_cast<unsigned char>(*cursor))) ++cursor;
        if (*cursor) throw fail(i, "trailing data after " + std::to_string(dim) + " values");
        ++row;
    }
    if (row != V) {
        throw DataError(path + ": header declares " + std::to_string(V) + " vectors, found " +
                        std::to_string(row));
    }
    return emb;
}

} // namespace fewlabel
