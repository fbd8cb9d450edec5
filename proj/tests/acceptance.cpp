// End-to-end acceptance suite. Each criterion prints one PASS/FAIL line with
// its runtime; the exit status is the number of failures. Pass criterion
// numbers as arguments to run a subset, e.g. `acceptance 2 8`.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "fewlabel/augment.hpp"
#include "fewlabel/dataset.hpp"
#include "fewlabel/embedding.hpp"
#include "fewlabel/features_io.hpp"
#include "fewlabel/grid.hpp"
#include "fewlabel/linear.hpp"
#include "fewlabel/metrics.hpp"
#include "fewlabel/model_io.hpp"
#include "fewlabel/predictor.hpp"
#include "fewlabel/rng.hpp"
#include "fewlabel/serve.hpp"
#include "fewlabel/tfidf.hpp"
#include "fewlabel/trees.hpp"
#include "fewlabel/uda.hpp"
#include "fewlabel/vocab.hpp"
#include "gradcheck.hpp"

// Must follow the Eigen-pulling headers above.
#include "fewlabel/http.hpp"
#include <json.hpp>

using namespace fewlabel;
using nlohmann::json;

namespace {

struct CheckFailure {
    std::string message;
};

void require(bool ok, const std::string& message) {
    if (!ok) throw CheckFailure{message};
}

std::string note; // optional detail appended to the PASS line

Eigen::MatrixXd random_matrix(Rng& rng, Eigen::Index r, Eigen::Index c) {
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rng.next_real() - 0.5;
    return m;
}

// k Gaussian-ish clusters around scaled basis vectors; linearly separable.
FeatureMatrix cluster_problem(int per_class, Eigen::Index d, int k, double noise,
                              std::uint64_t seed) {
    Rng rng(seed);
    FeatureMatrix data;
    data.rows.resize(static_cast<Eigen::Index>(per_class) * k, d);
    for (int c = 0; c < k; ++c) {
        data.classes.push_back("c" + std::to_string(c));
        for (int i = 0; i < per_class; ++i) {
            const Eigen::Index row = static_cast<Eigen::Index>(c) * per_class + i;
            for (Eigen::Index j = 0; j < d; ++j)
                data.rows(row, j) = noise * (rng.next_real() - 0.5);
            data.rows(row, c % d) += 3.0;
            data.labels.push_back(c);
        }
    }
    return data;
}

double accuracy_of(const std::vector<int>& pred, const std::vector<int>& gold) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < gold.size(); ++i)
        if (pred[i] == gold[i]) ++hits;
    return static_cast<double>(hits) / static_cast<double>(gold.size());
}

// --- 1: annealing schedules ------------------------------------------------

void criterion_tsa() {
    const long long total = 1000;
    const std::vector<TsaSchedule> curves = {TsaSchedule::Linear, TsaSchedule::Exp,
                                             TsaSchedule::Log};
    for (int num_classes : {2, 10, 50}) {
        for (TsaSchedule s : curves) {
            require(tsa_threshold(s, 0, total, num_classes) == 1.0 / num_classes,
                    "threshold at t=0 must equal 1/K exactly");
            require(tsa_threshold(s, total, total, num_classes) == 1.0,
                    "threshold at t=T must equal 1 exactly");
        }
        require(tsa_threshold(TsaSchedule::None, 0, total, num_classes) == 1.0 &&
                    tsa_threshold(TsaSchedule::None, total / 2, total, num_classes) == 1.0,
                "disabled annealing must hold the threshold at 1");
    }

    const int num_classes = 50;
    require(std::abs(tsa_threshold(TsaSchedule::Exp, 500, total, num_classes) - 0.1004433) <
                1e-6,
            "exponential midpoint off");
    require(std::abs(tsa_threshold(TsaSchedule::Linear, 500, total, num_classes) - 0.51) < 1e-6,
            "linear midpoint off");
    require(std::abs(tsa_threshold(TsaSchedule::Log, 500, total, num_classes) - 0.9195567) <
                1e-6,
            "logarithmic midpoint off");

    double prev_exp = 0.0, prev_lin = 0.0, prev_log = 0.0;
    for (long long t = 0; t <= total; ++t) {
        const double e = tsa_threshold(TsaSchedule::Exp, t, total, num_classes);
        const double l = tsa_threshold(TsaSchedule::Linear, t, total, num_classes);
        const double g = tsa_threshold(TsaSchedule::Log, t, total, num_classes);
        require(e <= l && l <= g, "curve ordering exp <= linear <= log violated");
        if (t > 0)
            require(e >= prev_exp && l >= prev_lin && g >= prev_log,
                    "thresholds must be nondecreasing in t");
        prev_exp = e;
        prev_lin = l;
        prev_log = g;
    }
}

// --- 2: gradient verification ------------------------------------------------

void grad_matrix_check(const Eigen::MatrixXd& analytic,
                       const std::function<double(Eigen::Index, Eigen::Index, double)>& perturbed,
                       const std::string& what) {
    for (Eigen::Index i = 0; i < analytic.rows(); ++i)
        for (Eigen::Index j = 0; j < analytic.cols(); ++j) {
            const double num =
                central_diff([&](double h) { return perturbed(i, j, h); });
            require(grad_close(analytic(i, j), num), what + " gradient mismatch");
        }
}

void criterion_gradients() {
    Rng rng(4242);
    const Eigen::Index d = 4;
    const int k = 3;

    auto random_labels = [&](Eigen::Index n) {
        std::vector<int> labels;
        for (Eigen::Index i = 0; i < n; ++i)
            labels.push_back(static_cast<int>(rng.next_index(k)));
        return labels;
    };

    for (int inst = 0; inst < 20; ++inst) {
        const Eigen::MatrixXd rows = random_matrix(rng, 6, d);
        const std::vector<int> labels = random_labels(6);
        const Eigen::MatrixXd w = random_matrix(rng, k, d);
        const Eigen::VectorXd b = random_matrix(rng, k, 1).col(0);
        const double l2 = (inst % 2 == 0) ? 0.0 : 0.3;
        const LossGrad g = logreg_loss_grad(w, b, rows, labels, l2);
        grad_matrix_check(
            g.d_weights,
            [&](Eigen::Index i, Eigen::Index j, double h) {
                Eigen::MatrixXd wp = w;
                wp(i, j) += h;
                return logreg_loss_grad(wp, b, rows, labels, l2).loss;
            },
            "logreg weight");
        grad_matrix_check(
            g.d_bias,
            [&](Eigen::Index i, Eigen::Index, double h) {
                Eigen::VectorXd bp = b;
                bp(i) += h;
                return logreg_loss_grad(w, bp, rows, labels, l2).loss;
            },
            "logreg bias");
    }

    int done = 0;
    while (done < 20) {
        const Eigen::MatrixXd rows = random_matrix(rng, 6, d);
        const std::vector<int> labels = random_labels(6);
        const Eigen::MatrixXd w = random_matrix(rng, k, d);
        const Eigen::VectorXd b = random_matrix(rng, k, 1).col(0);
        const double c = 2.0;
        // The hinge is non-differentiable where a margin hits exactly 1; skip
        // instances close to that kink.
        const Eigen::MatrixXd scores = linear_scores(w, b, rows);
        bool near_kink = false;
        for (Eigen::Index i = 0; i < scores.rows(); ++i)
            for (Eigen::Index j = 0; j < scores.cols(); ++j) {
                const double y = labels[static_cast<std::size_t>(i)] == j ? 1.0 : -1.0;
                if (std::abs(1.0 - y * scores(i, j)) < 1e-3) near_kink = true;
            }
        if (near_kink) continue;
        ++done;
        const LossGrad g = svm_loss_grad(w, b, rows, labels, c);
        grad_matrix_check(
            g.d_weights,
            [&](Eigen::Index i, Eigen::Index j, double h) {
                Eigen::MatrixXd wp = w;
                wp(i, j) += h;
                return svm_loss_grad(wp, b, rows, labels, c).loss;
            },
            "svm weight");
        grad_matrix_check(
            g.d_bias,
            [&](Eigen::Index i, Eigen::Index, double h) {
                Eigen::VectorXd bp = b;
                bp(i) += h;
                return svm_loss_grad(w, bp, rows, labels, c).loss;
            },
            "svm bias");
    }

    for (int inst = 0; inst < 20; ++inst) {
        const Eigen::Index dim = 5;
        const Eigen::VectorXd center = random_matrix(rng, dim, 1).col(0);
        const Eigen::VectorXd context = random_matrix(rng, dim, 1).col(0);
        std::vector<Eigen::VectorXd> negatives;
        for (std::size_t n = 0; n < 1 + rng.next_index(3); ++n)
            negatives.push_back(random_matrix(rng, dim, 1).col(0));
        const SgnsPairGrad g = sgns_pair_loss_grad(center, context, negatives);
        auto loss_with = [&](const Eigen::VectorXd& c2, const Eigen::VectorXd& x2,
                             const std::vector<Eigen::VectorXd>& n2) {
            return sgns_pair_loss_grad(c2, x2, n2).loss;
        };
        for (Eigen::Index j = 0; j < dim; ++j) {
            double num = central_diff([&](double h) {
                Eigen::VectorXd p = center;
                p(j) += h;
                return loss_with(p, context, negatives);
            });
            require(grad_close(g.d_center(j), num), "sgns center gradient mismatch");
            num = central_diff([&](double h) {
                Eigen::VectorXd p = context;
                p(j) += h;
                return loss_with(center, p, negatives);
            });
            require(grad_close(g.d_context(j), num), "sgns context gradient mismatch");
            for (std::size_t n = 0; n < negatives.size(); ++n) {
                num = central_diff([&](double h) {
                    std::vector<Eigen::VectorXd> p = negatives;
                    p[n](j) += h;
                    return loss_with(center, context, p);
                });
                require(grad_close(g.d_negatives[n](j), num),
                        "sgns negative gradient mismatch");
            }
        }
    }

    done = 0;
    while (done < 20) {
        FeatureMatrix sup;
        sup.rows = random_matrix(rng, 5, d);
        sup.labels = random_labels(5);
        for (int c = 0; c < k; ++c) sup.classes.push_back("c" + std::to_string(c));
        const Eigen::MatrixXd unsup_orig = random_matrix(rng, 4, d);
        const Eigen::MatrixXd unsup_aug = unsup_orig + 0.1 * random_matrix(rng, 4, d);
        const Eigen::MatrixXd w = random_matrix(rng, k, d);
        const Eigen::VectorXd b = random_matrix(rng, k, 1).col(0);
        const double eta = 0.8, lambda = 0.7, tau = 0.8, beta = 0.3;

        // Finite differences must not step across a masking boundary; skip
        // instances where a kept/dropped decision sits within 1e-3 of its
        // threshold.
        const Eigen::MatrixXd p_sup = softmax_rows(linear_scores(w, b, sup.rows));
        const Eigen::MatrixXd p_orig = softmax_rows(linear_scores(w, b, unsup_orig));
        bool near_boundary = false;
        for (Eigen::Index i = 0; i < p_sup.rows(); ++i)
            if (std::abs(p_sup(i, sup.labels[static_cast<std::size_t>(i)]) - eta) < 1e-3)
                near_boundary = true;
        for (Eigen::Index i = 0; i < p_orig.rows(); ++i)
            if (std::abs(p_orig.row(i).maxCoeff() - beta) < 1e-3) near_boundary = true;
        if (near_boundary) continue;
        ++done;

        const UdaLossGrad g = uda_loss_grad(w, b, sup.rows, sup.labels, eta, unsup_orig,
                                            unsup_aug, lambda, tau, beta);
        // The sharpened targets are constants of the optimization, so the
        // reference objective holds them at the base parameters and lets the
        // perturbation act only through the augmented branch.
        auto loss_at = [&](const Eigen::MatrixXd& wp, const Eigen::VectorXd& bp) {
            const Eigen::MatrixXd sup_probs = softmax_rows(linear_scores(wp, bp, sup.rows));
            const Eigen::MatrixXd p_aug = softmax_rows(linear_scores(wp, bp, unsup_aug));
            return supervised_tsa_loss(sup_probs, sup.labels, eta).loss +
                   lambda * consistency_loss(p_orig, p_aug, tau, beta);
        };
        grad_matrix_check(
            g.d_weights,
            [&](Eigen::Index i, Eigen::Index j, double h) {
                Eigen::MatrixXd wp = w;
                wp(i, j) += h;
                return loss_at(wp, b);
            },
            "combined objective weight");
        grad_matrix_check(
            g.d_bias,
            [&](Eigen::Index i, Eigen::Index, double h) {
                Eigen::VectorXd bp = b;
                bp(i) += h;
                return loss_at(w, bp);
            },
            "combined objective bias");
    }
}

// --- 3: frequency-weighting oracle ------------------------------------------

void criterion_tfidf_oracle() {
    Rng rng(99);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t pool = 1 + rng.next_index(20);
        const std::size_t n_docs = 1 + rng.next_index(10);
        std::vector<TokenizedDoc> docs;
        for (std::size_t i = 0; i < n_docs; ++i) {
            TokenizedDoc doc;
            doc.id = "d" + std::to_string(i);
            const std::size_t len = 1 + rng.next_index(50);
            for (std::size_t t = 0; t < len; ++t)
                doc.tokens.push_back("t" + std::to_string(rng.next_index(pool)));
            docs.push_back(doc);
        }

        const TfIdfTable table = compute_tfidf(docs);
        require(table.doc_count == static_cast<long long>(n_docs), "document count wrong");

        for (const TokenizedDoc& doc : docs) {
            const std::vector<double> scores = tfidf_doc_scores(doc, table);
            require(scores.size() == doc.tokens.size(), "one score per position expected");
            for (std::size_t pos = 0; pos < doc.tokens.size(); ++pos) {
                const std::string& token = doc.tokens[pos];
                long long df = 0;
                for (const TokenizedDoc& other : docs)
                    if (std::count(other.tokens.begin(), other.tokens.end(), token) > 0) ++df;
                const double tf =
                    static_cast<double>(std::count(doc.tokens.begin(), doc.tokens.end(), token)) /
                    static_cast<double>(doc.tokens.size());
                const double expected =
                    tf * std::log(static_cast<double>(n_docs) / static_cast<double>(df));
                require(std::abs(scores[pos] - expected) <= 1e-9,
                        "score disagrees with the counting oracle");
                require(std::abs(tfidf_score(token, doc, table) - expected) <= 1e-9,
                        "positional and lookup scores disagree");
            }
        }
    }
}

// --- 4: augmentation contracts ------------------------------------------------

void criterion_augmentation() {
    // Letters only: these tokens must survive text normalization unchanged
    // when the round trip re-tokenizes the translated string.
    auto word = [](std::size_t i) {
        std::string w = "w";
        w += static_cast<char>('a' + i % 26);
        w += static_cast<char>('a' + (i / 26) % 26);
        return w;
    };
    Rng rng(7);
    std::vector<TokenizedDoc> docs;
    for (int i = 0; i < 40; ++i) {
        TokenizedDoc doc;
        doc.id = "d" + std::to_string(i);
        doc.label = "c" + std::to_string(i % 3);
        const std::size_t len = 5 + rng.next_index(12);
        for (std::size_t t = 0; t < len; ++t) doc.tokens.push_back(word(rng.next_index(30)));
        docs.push_back(doc);
    }
    Dataset dataset = make_dataset(docs);
    const TfIdfTable table = compute_tfidf(dataset.docs);
    const Vocabulary vocab = build_vocab(dataset.docs, 1);

    AugmentConfig config;
    config.p_max = 1.0;
    config.pool_fraction = 1.0;
    config.seed = 11;

    AugmentDeps deps;
    deps.table = &table;
    deps.vocab = &vocab;
    const Dataset doubled = augment_dataset(dataset, AugmentStrategy::TfIdfReplace, deps, config);
    const std::size_t n = dataset.docs.size();
    require(doubled.docs.size() == 2 * n, "augmentation must double the corpus");
    for (std::size_t i = 0; i < n; ++i) {
        const TokenizedDoc& orig = doubled.docs[i];
        const TokenizedDoc& aug = doubled.docs[n + i];
        require(orig.id == dataset.docs[i].id && orig.tokens == dataset.docs[i].tokens,
                "originals must pass through unchanged");
        require(aug.id == orig.id + "#aug", "counterpart id must gain the #aug suffix");
        require(aug.label == orig.label, "counterpart must keep the label");
        require(aug.tokens.size() == orig.tokens.size(),
                "replacement must preserve the token count");
        const std::vector<double> scores = tfidf_doc_scores(orig, table);
        const std::size_t top = static_cast<std::size_t>(
            std::max_element(scores.begin(), scores.end()) - scores.begin());
        require(aug.tokens[top] == orig.tokens[top],
                "the highest-scored position must never be replaced");
    }

    config.p_max = 0.0;
    for (const TokenizedDoc& doc : dataset.docs)
        require(tfidf_replace(doc, table, vocab, config).tokens == doc.tokens,
                "p_max = 0 must be the identity");

    const MockTranslator identity;
    deps.translator = &identity;
    const Dataset round =
        augment_dataset(dataset, AugmentStrategy::BackTranslation, deps, config);
    require(round.docs.size() == 2 * n, "back-translation must double too");
    for (std::size_t i = 0; i < n; ++i) {
        require(round.docs[n + i].tokens == dataset.docs[i].tokens,
                "identity translator must round-trip every document unchanged");
        require(round.docs[n + i].id == dataset.docs[i].id + "#bt",
                "round-trip id must gain the #bt suffix");
    }
}

// --- 5: stratified split counts ------------------------------------------------

void criterion_split() {
    std::vector<TokenizedDoc> docs;
    for (int c = 0; c < 50; ++c)
        for (int i = 0; i < 130; ++i) {
            TokenizedDoc doc;
            doc.id = "c" + std::to_string(c) + "-" + std::to_string(i);
            doc.tokens = {"x"};
            doc.label = "class" + std::to_string(c);
            docs.push_back(doc);
        }
    SplitSpec spec;
    spec.train_n = 70;
    spec.valid_n = 30;
    spec.test_n = 30;
    spec.seed = 5;
    const SplitResult split = stratified_split(make_dataset(docs), spec);
    require(split.train.docs.size() == 3500, "train split must hold 3500 documents");
    require(split.valid.docs.size() == 1500, "validation split must hold 1500 documents");
    require(split.test.docs.size() == 1500, "test split must hold 1500 documents");

    std::set<std::string> seen;
    auto tally = [&](const Dataset& part, int want) {
        std::map<std::string, int> counts;
        for (const TokenizedDoc& doc : part.docs) {
            counts[*doc.label] += 1;
            require(seen.insert(doc.id).second, "splits must be disjoint");
        }
        require(counts.size() == 50, "every class must appear");
        for (const auto& [label, count] : counts)
            require(count == want, "per-class count must be exact for " + label);
    };
    tally(split.train, 70);
    tally(split.valid, 30);
    tally(split.test, 30);
}

// --- 6: supervised learners ------------------------------------------------

void criterion_supervised() {
    const FeatureMatrix clusters = cluster_problem(20, 8, 4, 0.25, 21);

    const LinearModel lr = train_logreg(clusters, 0.0, 150, 0.05, 32, 1);
    require(accuracy_of(predict(lr, clusters.rows), clusters.labels) == 1.0,
            "logistic regression must fit the separable clusters exactly");

    const LinearModel svm = train_svm(clusters, 1.0, 200, 0.05, 1);
    require(accuracy_of(predict(svm, clusters.rows), clusters.labels) == 1.0,
            "the margin classifier must fit the separable clusters exactly");

    // A single unbounded tree over all features memorizes any distinct-row set.
    Rng rng(33);
    FeatureMatrix distinct;
    distinct.rows = random_matrix(rng, 60, 5);
    for (int i = 0; i < 60; ++i)
        distinct.labels.push_back(static_cast<int>(rng.next_index(4)));
    for (int c = 0; c < 4; ++c) distinct.classes.push_back("c" + std::to_string(c));
    RandomForestParams forest;
    forest.n_trees = 1;
    forest.max_depth = 0;
    forest.min_leaf = 1;
    forest.max_features = 5;
    const TreeEnsembleModel tree = train_random_forest(distinct, forest, 3);
    require(accuracy_of(predict(tree, distinct.rows), distinct.labels) == 1.0,
            "a single full tree must memorize distinct rows");

    GradBoostParams boost;
    boost.n_rounds = 40;
    boost.shrinkage = 0.5;
    boost.max_depth = 3;
    const TreeEnsembleModel gb = train_gradient_boost(clusters, boost, 3);
    require(accuracy_of(predict(gb, clusters.rows), clusters.labels) == 1.0,
            "boosting must fit the separable clusters exactly");

    // Stratified folds: per-class fold sizes differ by at most one.
    std::vector<int> labels;
    std::vector<std::string> classes = {"a", "b", "c"};
    const std::vector<int> sizes = {17, 23, 9};
    for (int c = 0; c < 3; ++c)
        for (int i = 0; i < sizes[static_cast<std::size_t>(c)]; ++i) labels.push_back(c);
    const std::vector<int> folds = stratified_folds(labels, classes, 5, 2);
    require(folds == stratified_folds(labels, classes, 5, 2),
            "fold assignment must be deterministic");
    for (int c = 0; c < 3; ++c) {
        std::vector<int> per_fold(5, 0);
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == c) per_fold[static_cast<std::size_t>(folds[i])] += 1;
        const auto [lo, hi] = std::minmax_element(per_fold.begin(), per_fold.end());
        require(*hi - *lo <= 1, "per-class fold sizes must differ by at most one");
    }

    // Tie-break: equally perfect configurations resolve to the earliest, and
    // the search enumeration varies the last declared parameter fastest.
    GridSpec grid;
    grid.params = {{"C", {1.0, 1000.0}}, {"epochs", {60.0, 80.0}}};
    grid.folds = 4;
    grid.seed = 9;
    const GridSearchOutcome first = grid_search_cv(ModelKind::Svm, clusters, grid);
    const GridSearchOutcome second = grid_search_cv(ModelKind::Svm, clusters, grid);
    require(first.best == second.best, "repeated searches must agree");
    require(first.table.size() == 4, "cartesian product must be exhaustive");
    require(first.table[0].params.at("C") == 1.0 && first.table[0].params.at("epochs") == 60.0 &&
                first.table[1].params.at("C") == 1.0 &&
                first.table[1].params.at("epochs") == 80.0 &&
                first.table[2].params.at("C") == 1000.0,
            "enumeration must vary the last declared parameter fastest");
    require(first.table[0].mean_accuracy == 1.0 && first.table[2].mean_accuracy == 1.0,
            "both margin settings should be perfect here");
    require(first.best.at("C") == 1.0 && first.best.at("epochs") == 60.0,
            "exact ties must keep the earliest configuration");
}

// --- 7: consistency-free reduction ------------------------------------------

void criterion_reduction() {
    Rng rng(55);
    FeatureMatrix sup;
    sup.rows = random_matrix(rng, 48, 6);
    for (int i = 0; i < 48; ++i) sup.labels.push_back(static_cast<int>(rng.next_index(3)));
    for (int c = 0; c < 3; ++c) sup.classes.push_back("c" + std::to_string(c));

    std::vector<UnlabeledPair> pairs;
    for (int i = 0; i < 30; ++i) {
        UnlabeledPair pair;
        pair.id = "u" + std::to_string(i);
        pair.original = random_matrix(rng, 6, 1).col(0);
        pair.augmented = random_matrix(rng, 6, 1).col(0);
        pairs.push_back(pair);
    }

    UdaConfig config;
    config.schedule = TsaSchedule::None;
    config.lambda = 0.0;
    config.sup_batch = 16;
    config.unsup_batch = 8;
    config.learning_rate = 0.05;
    config.seed = 77;
    config.total_steps = 12; // 48/16 batches per epoch, 4 epochs

    const LinearModel semi = train_uda(sup, pairs, config);
    const LinearModel plain = train_logreg(sup, 0.0, 4, 0.05, 16, 77);
    require(semi.weights.rows() == plain.weights.rows() &&
                semi.weights.cols() == plain.weights.cols(),
            "shapes must agree");
    require(std::memcmp(semi.weights.data(), plain.weights.data(),
                        sizeof(double) * static_cast<std::size_t>(semi.weights.size())) == 0,
            "weights must match the supervised path bit for bit");
    require(std::memcmp(semi.bias.data(), plain.bias.data(),
                        sizeof(double) * static_cast<std::size_t>(semi.bias.size())) == 0,
            "biases must match the supervised path bit for bit");
}

// --- 8: consistency training beats the few-label baseline --------------------

void criterion_semi_supervised_gain() {
    const int num_classes = 10;
    const int vocab_size = 500;
    const int doc_len = 20;
    const int labeled_per_class = 10;
    const int unlabeled_per_class = 200;
    const int test_per_class = 30;
    const double signal_mass = 0.60; // probability a token comes from the class block
    const int dim = 64;

    // Fixed token featurizer shared by both arms: a random projection of the
    // vocabulary, averaged over each document.
    EmbeddingMatrix projection;
    projection.vocab.min_count = 1;
    for (int v = 0; v < vocab_size; ++v) {
        const std::string token = "w" + std::to_string(v);
        projection.vocab.index[token] = v;
        projection.vocab.tokens.push_back(token);
        projection.vocab.counts.push_back(1);
    }
    Rng proj_rng(2718);
    projection.vectors.resize(vocab_size, dim);
    for (int v = 0; v < vocab_size; ++v)
        for (int j = 0; j < dim; ++j)
            projection.vectors(v, j) = static_cast<float>(proj_rng.next_real() * 2.0 - 1.0);

    // Class c draws signal tokens from block [40c, 40c+40); the last 100
    // tokens are shared filler every class uses.
    auto sample_doc = [&](Rng& rng, int c, const std::string& id,
                          std::optional<std::string> label) {
        TokenizedDoc doc;
        doc.id = id;
        doc.label = std::move(label);
        for (int t = 0; t < doc_len; ++t) {
            int v;
            if (rng.next_real() < signal_mass)
                v = 40 * c + static_cast<int>(rng.next_index(40));
            else
                v = 400 + static_cast<int>(rng.next_index(100));
            doc.tokens.push_back("w" + std::to_string(v));
        }
        return doc;
    };
    auto featurize = [&](const std::vector<TokenizedDoc>& docs) {
        Eigen::MatrixXd rows(static_cast<Eigen::Index>(docs.size()), dim);
        for (std::size_t i = 0; i < docs.size(); ++i)
            rows.row(static_cast<Eigen::Index>(i)) =
                doc_vector(docs[i].tokens, projection).transpose();
        return rows;
    };

    int wins = 0;
    double delta_sum = 0.0, baseline_sum = 0.0, semi_sum = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        Rng rng(1000 + seed);

        std::vector<TokenizedDoc> labeled, unlabeled, test;
        std::vector<int> test_gold;
        for (int c = 0; c < num_classes; ++c) {
            const std::string name = "c" + std::to_string(c);
            for (int i = 0; i < labeled_per_class; ++i)
                labeled.push_back(
                    sample_doc(rng, c, name + "-l" + std::to_string(i), name));
            for (int i = 0; i < unlabeled_per_class; ++i)
                unlabeled.push_back(
                    sample_doc(rng, c, name + "-u" + std::to_string(i), std::nullopt));
            for (int i = 0; i < test_per_class; ++i) {
                test.push_back(sample_doc(rng, c, name + "-t" + std::to_string(i), std::nullopt));
                test_gold.push_back(c);
            }
        }

        // Uninformative-word replacement pairs over the unlabeled pool.
        const TfIdfTable table = compute_tfidf(unlabeled);
        const Vocabulary vocab = build_vocab(unlabeled, 1);
        AugmentConfig aug;
        aug.p_max = 0.3;
        aug.pool_fraction = 0.5;
        aug.seed = seed;
        std::vector<UnlabeledPair> pairs;
        for (const TokenizedDoc& doc : unlabeled) {
            const TokenizedDoc replaced = tfidf_replace(doc, table, vocab, aug);
            UnlabeledPair pair;
            pair.id = doc.id;
            pair.original = doc_vector(doc.tokens, projection);
            pair.augmented = doc_vector(replaced.tokens, projection);
            pairs.push_back(std::move(pair));
        }

        FeatureMatrix sup;
        sup.rows = featurize(labeled);
        for (int c = 0; c < num_classes; ++c) {
            sup.classes.push_back("c" + std::to_string(c));
            for (int i = 0; i < labeled_per_class; ++i) sup.labels.push_back(c);
        }
        const Eigen::MatrixXd test_rows = featurize(test);

        const LinearModel baseline = train_logreg(sup, 0.0, 200, 0.05, 32, seed);
        UdaConfig config;
        config.schedule = TsaSchedule::Log;
        config.total_steps = 2000;
        config.lambda = 1.0;
        config.temperature = 0.4;
        config.confidence = 0.0;
        config.sup_batch = 32;
        config.unsup_batch = 32;
        config.learning_rate = 0.05;
        config.seed = seed;
        const LinearModel semi = train_uda(sup, pairs, config);

        const double base_acc = accuracy_of(predict(baseline, test_rows), test_gold);
        const double semi_acc = accuracy_of(predict(semi, test_rows), test_gold);
        if (semi_acc >= base_acc) ++wins;
        delta_sum += semi_acc - base_acc;
        baseline_sum += base_acc;
        semi_sum += semi_acc;
    }

    char buf[128];
    std::snprintf(buf, sizeof(buf), "baseline %.3f, consistency %.3f, %d/5 seeds",
                  baseline_sum / 5.0, semi_sum / 5.0, wins);
    note = buf;
    require(wins >= 4, std::string("needed 4 of 5 seeds, got ") + buf);
    require(delta_sum / 5.0 >= 0.02,
            std::string("needed a mean gain of 2 points, got ") + buf);
}

// --- 9: metrics ---------------------------------------------------------------

void criterion_metrics() {
    Rng rng(13);
    const std::vector<std::string> classes = {"k0", "k1", "k2", "k3",
                                              "k4", "k5", "k6", "k7"};
    std::vector<PredRanking> rankings;
    std::map<std::string, std::string> gold;
    for (int i = 0; i < 50; ++i) {
        const std::string id = "d" + std::to_string(i);
        Eigen::VectorXd scores(8);
        for (int j = 0; j < 8; ++j) scores(j) = rng.next_real();
        rankings.push_back(make_ranking(id, classes, scores));
        gold[id] = classes[rng.next_index(classes.size())];
    }
    const double at1 = accuracy_at_k(rankings, gold, 1);
    const double at3 = accuracy_at_k(rankings, gold, 3);
    const double at5 = accuracy_at_k(rankings, gold, 5);
    require(at1 <= at3 && at3 <= at5, "top-k accuracy must be nondecreasing in k");
    require(accuracy_at_k(rankings, gold, 8) == 1.0,
            "the gold class always sits inside the full ranking");

    std::map<std::string, std::string> preds2 = {
        {"1", "A"}, {"2", "B"}, {"3", "B"}, {"4", "B"}};
    std::map<std::string, std::string> gold2 = {
        {"1", "A"}, {"2", "A"}, {"3", "B"}, {"4", "B"}};
    const EvalSummary summary = per_class_metrics(preds2, gold2, {"A", "B"});
    require(summary.accuracy == 0.75, "hand-computed accuracy must match");
    require(summary.per_class[0].precision == 1.0 && summary.per_class[0].recall == 0.5,
            "class A confusion row must match");
    require(std::abs(summary.per_class[0].f1 - 2.0 / 3.0) < 1e-12, "class A f1 must match");
    require(std::abs(summary.per_class[1].precision - 2.0 / 3.0) < 1e-12 &&
                summary.per_class[1].recall == 1.0,
            "class B confusion row must match");
    require(std::abs(summary.per_class[1].f1 - 0.8) < 1e-12, "class B f1 must match");
    require(std::abs(summary.macro_f1 - (2.0 / 3.0 + 0.8) / 2.0) < 1e-12,
            "macro f1 must be the unweighted mean");

    const json report = json::parse(
        evaluation_report_json(summary, {{1, at1}, {3, at3}, {5, at5}}));
    require(report.contains("accuracy") && report.contains("per_class"),
            "report must carry accuracy and per-class sections");
    for (const char* key : {"precision", "recall", "f1"})
        require(report["macro"].contains(key), "report must carry macro aggregates");
    for (const char* key : {"1", "3", "5"})
        require(report["acc_at"].contains(key), "report must carry top-k accuracies");
}

// --- 10: persistence and serving ---------------------------------------------

void criterion_persistence_and_serving() {
    const std::filesystem::path dir =
        std::filesystem::temp_directory_path() / "fewlabel-acceptance";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);

    // Round-trip both payload families and compare scores bit for bit.
    const FeatureMatrix data = cluster_problem(25, 6, 3, 0.4, 8);
    Rng rng(64);
    const Eigen::MatrixXd probes = random_matrix(rng, 100, 6);
    const std::vector<std::pair<std::string, Model>> models = {
        {"linear", train_logreg(data, 0.01, 60, 0.05, 32, 5)},
        {"boosted", train_gradient_boost(data, {.n_rounds = 10, .shrinkage = 0.3, .max_depth = 2}, 5)},
    };
    for (const auto& [tag, model] : models) {
        const std::string path = (dir / (tag + ".json")).string();
        save_model(path, SavedModel{model, {}, FeaturizerInfo{}});
        const SavedModel back = load_model(path);
        const Eigen::MatrixXd before = model_scores(model, probes);
        const Eigen::MatrixXd after = model_scores(back.model, probes);
        require(std::memcmp(before.data(), after.data(),
                            sizeof(double) * static_cast<std::size_t>(before.size())) == 0,
                tag + " scores must survive the round trip bit for bit");
        require(model_predict(back.model, probes) == model_predict(model, probes),
                tag + " predictions must survive the round trip");
    }

    // A raw-text predictor behind the HTTP endpoint.
    EmbeddingMatrix embeddings;
    embeddings.vocab = build_vocab(
        {{"e", {"agua"}, std::nullopt}, {"e2", {"luz"}, std::nullopt}, {"e3", {"lixo"}, std::nullopt}},
        1);
    embeddings.vectors = Eigen::MatrixXf::Identity(3, 3);
    const std::string emb_path = (dir / "emb.txt").string();
    write_embeddings(embeddings, emb_path);

    FeatureMatrix text_data;
    text_data.classes = {"agua", "energia", "limpeza"};
    text_data.rows.resize(90, 3);
    Rng nrng(4);
    for (int c = 0; c < 3; ++c)
        for (int i = 0; i < 30; ++i) {
            const Eigen::Index row = c * 30 + i;
            for (int j = 0; j < 3; ++j) text_data.rows(row, j) = 0.05 * nrng.next_real();
            const int token = embeddings.vocab.index_of(
                std::vector<std::string>{"agua", "luz", "lixo"}[static_cast<std::size_t>(c)]);
            text_data.rows(row, token) += 1.0;
            text_data.labels.push_back(c);
        }
    const std::string model_path = (dir / "served.json").string();
    FeaturizerInfo featurizer;
    featurizer.kind = "avg_embeddings";
    featurizer.embeddings = emb_path;
    save_model(model_path,
               SavedModel{train_logreg(text_data, 0.0, 80, 0.05, 32, 6), {}, featurizer});

    const Predictor predictor(model_path);
    httplib::Server server;
    attach_routes(server, predictor);
    const int port = server.bind_to_any_port("127.0.0.1");
    require(port > 0, "server must bind");

    // Stop and join on every exit path, including a thrown check failure.
    struct Listener {
        httplib::Server& server;
        std::thread thread;
        explicit Listener(httplib::Server& s)
            : server(s), thread([&s] { s.listen_after_bind(); }) {}
        ~Listener() {
            server.stop();
            thread.join();
        }
    } listener(server);
    server.wait_until_ready();

    const std::string body = json{{"text", "falta de luz no poste"}, {"k", 3}}.dump();
    std::vector<std::string> responses(100);
    std::vector<int> statuses(100, 0);
    std::vector<std::thread> workers;
    for (int i = 0; i < 100; ++i)
        workers.emplace_back([&, i] {
            httplib::Client client("127.0.0.1", port);
            if (auto res = client.Post("/predict", body, "application/json")) {
                statuses[static_cast<std::size_t>(i)] = res->status;
                responses[static_cast<std::size_t>(i)] = res->body;
            }
        });
    for (std::thread& w : workers) w.join();

    for (int i = 0; i < 100; ++i) {
        require(statuses[static_cast<std::size_t>(i)] == 200, "every request must succeed");
        require(responses[static_cast<std::size_t>(i)] == responses[0],
                "concurrent responses must be identical");
    }
    const json parsed = json::parse(responses[0]);
    require(parsed["predictions"].size() == 3, "three predictions requested");
    require(parsed["predictions"][0]["label"] == "energia",
            "the topical class must rank first");

    httplib::Client client("127.0.0.1", port);
    const auto bad = client.Post("/predict", "{not json", "application/json");
    require(bad && bad->status == 400, "malformed request body must yield 400");
    const auto health = client.Get("/healthz");
    require(health && health->status == 200, "health endpoint must answer");
}

// --- driver ---------------------------------------------------------------

struct Criterion {
    const char* name;
    double budget_seconds;
    void (*body)();
};

const Criterion kCriteria[] = {
    {"01 annealing schedule boundaries, midpoints and ordering", 1.0, criterion_tsa},
    {"02 analytic gradients match central differences", 30.0, criterion_gradients},
    {"03 frequency weighting matches a counting oracle", 5.0, criterion_tfidf_oracle},
    {"04 augmentation doubles, preserves counts, keeps top tokens", 5.0, criterion_augmentation},
    {"05 stratified split reproduces exact per-class counts", 1.0, criterion_split},
    {"06 every supervised learner fits its toy problem", 60.0, criterion_supervised},
    {"07 zero-weight consistency reduces to the supervised path", 10.0, criterion_reduction},
    {"08 consistency training beats the few-label baseline", 300.0,
     criterion_semi_supervised_gain},
    {"09 ranking metrics match hand-computed examples", 1.0, criterion_metrics},
    {"10 models survive reload and concurrent serving", 30.0,
     criterion_persistence_and_serving},
};

} // namespace

int main(int argc, char** argv) {
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

    int failures = 0;
    int index = 0;
    for (const Criterion& criterion : kCriteria) {
        ++index;
        if (!selected.empty() && selected.count(index) == 0) continue;
        note.clear();
        const auto start = std::chrono::steady_clock::now();
        std::string failure;
        try {
            criterion.body();
        } catch (const CheckFailure& f) {
            failure = f.message;
        } catch (const std::exception& e) {
            failure = std::string("unexpected error: ") + e.what();
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (failure.empty() && elapsed > criterion.budget_seconds) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "exceeded the %.0fs budget", criterion.budget_seconds);
            failure = buf;
        }
        if (failure.empty()) {
            if (note.empty())
                std::printf("PASS - %s (%.2fs)\n", criterion.name, elapsed);
            else
                std::printf("PASS - %s (%s) (%.2fs)\n", criterion.name, note.c_str(), elapsed);
        } else {
            std::printf("FAIL - %s: %s (%.2fs)\n", criterion.name, failure.c_str(), elapsed);
            ++failures;
        }
        std::fflush(stdout);
    }
    if (selected.empty())
        std::printf(failures == 0 ? "all 10 criteria passed\n" : "%d criteria failed\n",
                    failures);
    return failures;
}
