#include "fewlabel/trees.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fewlabel/errors.hpp"
#include "fewlabel/rng.hpp"

namespace fewlabel {

namespace {

constexpr double kMinGain = 1e-12;

struct SplitChoice {
    int feature = -1;
    double threshold = 0.0;
    double score = 0.0; // impurity after the split; lower is better
    bool found = false;
};

// Shared CART machinery. `targets` drives regression trees; classification
// trees use `labels`/`num_classes` with Gini impurity instead.
class TreeBuilder {
public:
    TreeBuilder(const Eigen::MatrixXd& rows, int max_depth, int min_leaf, int max_features, Rng& rng)
        : rows_(rows), max_depth_(max_depth), min_leaf_(min_leaf), max_features_(max_features), rng_(rng) {}

    Tree build_classification(const std::vector<std::size_t>& indices, const std::vector<int>& labels,
                              int num_classes) {
        labels_ = &labels;
        num_classes_ = num_classes;
        targets_ = nullptr;
        Tree tree;
        grow(tree, indices, 0);
        return tree;
    }

    Tree build_regression(const std::vector<std::size_t>& indices, const Eigen::VectorXd& targets,
                          int leaf_class, int num_classes) {
        targets_ = &targets;
        leaf_class_ = leaf_class;
        num_classes_ = num_classes;
        labels_ = nullptr;
        Tree tree;
        grow(tree, indices, 0);
        return tree;
    }

private:
    bool is_regression() const { return targets_ != nullptr; }

    Eigen::VectorXd leaf_value(const std::vector<std::size_t>& indices) const {
        Eigen::VectorXd value = Eigen::VectorXd::Zero(num_classes_);
        if (is_regression()) {
            double sum = 0.0;
            for (std::size_t i : indices) sum += (*targets_)(static_cast<Eigen::Index>(i));
            value(leaf_class_) = sum / static_cast<double>(indices.size());
        } else {
            for (std::size_t i : indices) value((*labels_)[i]) += 1.0;
            value /= static_cast<double>(indices.size());
        }
        return value;
    }

    bool is_pure(const std::vector<std::size_t>& indices) const {
        if (is_regression()) {
            const double first = (*targets_)(static_cast<Eigen::Index>(indices[0]));
            for (std::size_t i : indices) {
                if ((*targets_)(static_cast<Eigen::Index>(i)) != first) return false;
            }
            return true;
        }
        const int first = (*labels_)[indices[0]];
        for (std::size_t i : indices) {
            if ((*labels_)[i] != first) return false;
        }
        return true;
    }

    double node_impurity(const std::vector<std::size_t>& indices) const {
        const double n = static_cast<double>(indices.size());
        if (is_regression()) {
            double sum = 0.0, sum2 = 0.0;
            for (std::size_t i : indices) {
                const double t = (*targets_)(static_cast<Eigen::Index>(i));
                sum += t;
                sum2 += t * t;
            }
            return sum2 - sum * sum / n; // total squared error around the mean
        }
        std::vector<double> counts(static_cast<std::size_t>(num_classes_), 0.0);
        for (std::size_t i : indices) counts[static_cast<std::size_t>((*labels_)[i])] += 1.0;
        double gini = 1.0;
        for (double c : counts) gini -= (c / n) * (c / n);
        return gini * n; // weighted by node size, comparable to split scores
    }

    // Candidate features for this node: all of them, or a random subset of
    // max_features_ drawn without replacement (forest mode).
    std::vector<int> candidate_features() {
        const int d = static_cast<int>(rows_.cols());
        std::vector<int> features(static_cast<std::size_t>(d));
        std::iota(features.begin(), features.end(), 0);
        if (max_features_ <= 0 || max_features_ >= d) return features;
        for (int i = 0; i < max_features_; ++i) {
            const auto j = i + static_cast<int>(rng_.next_index(static_cast<std::size_t>(d - i)));
            std::swap(features[static_cast<std::size_t>(i)], features[static_cast<std::size_t>(j)]);
        }
        features.resize(static_cast<std::size_t>(max_features_));
        return features;
    }

    SplitChoice best_split(const std::vector<std::size_t>& indices) {
        const auto n = indices.size();
        SplitChoice best;
        std::vector<std::size_t> order(indices);
        for (int f : candidate_features()) {
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                const double va = rows_(static_cast<Eigen::Index>(a), f);
                const double vb = rows_(static_cast<Eigen::Index>(b), f);
                if (va != vb) return va < vb;
                return a < b;
            });
            if (is_regression()) {
                scan_regression(order, f, best);
            } else {
                scan_classification(order, f, best);
            }
        }
        (void)n;
        return best;
    }

    void scan_classification(const std::vector<std::size_t>& order, int feature, SplitChoice& best) {
        const auto n = order.size();
        std::vector<double> left(static_cast<std::size_t>(num_classes_), 0.0);
        std::vector<double> right(static_cast<std::size_t>(num_classes_), 0.0);
        for (std::size_t i : order) right[static_cast<std::size_t>((*labels_)[i])] += 1.0;

        for (std::size_t p = 1; p < n; ++p) {
            const auto moved = static_cast<std::size_t>((*labels_)[order[p - 1]]);
            left[moved] += 1.0;
            right[moved] -= 1.0;
            const double va = rows_(static_cast<Eigen::Index>(order[p - 1]), feature);
            const double vb = rows_(static_cast<Eigen::Index>(order[p]), feature);
            if (va == vb) continue;
            const auto nl = static_cast<double>(p);
            const auto nr = static_cast<double>(n - p);
            if (p < static_cast<std::size_t>(min_leaf_) || n - p < static_cast<std::size_t>(min_leaf_)) continue;
            double gini_l = 1.0, gini_r = 1.0;
            for (int k = 0; k < num_classes_; ++k) {
                const double cl = left[static_cast<std::size_t>(k)] / nl;
                const double cr = right[static_cast<std::size_t>(k)] / nr;
                gini_l -= cl * cl;
                gini_r -= cr * cr;
            }
            const double score = nl * gini_l + nr * gini_r;
            if (!best.found || score < best.score) {
                best.found = true;
                best.feature = feature;
                best.threshold = va + (vb - va) / 2.0;
                best.score = score;
            }
        }
    }

    void scan_regression(const std::vector<std::size_t>& order, int feature, SplitChoice& best) {
        const auto n = order.size();
        double sum_r = 0.0, sum2_r = 0.0;
        for (std::size_t i : order) {
            const double t = (*targets_)(static_cast<Eigen::Index>(i));
            sum_r += t;
            sum2_r += t * t;
        }
        double sum_l = 0.0, sum2_l = 0.0;
        for (std::size_t p = 1; p < n; ++p) {
            const double moved = (*targets_)(static_cast<Eigen::Index>(order[p - 1]));
            sum_l += moved;
            sum2_l += moved * moved;
            const double va = rows_(static_cast<Eigen::Index>(order[p - 1]), feature);
            const double vb = rows_(static_cast<Eigen::Index>(order[p]), feature);
            if (va == vb) continue;
            if (p < static_cast<std::size_t>(min_leaf_) || n - p < static_cast<std::size_t>(min_leaf_)) continue;
            const auto nl = static_cast<double>(p);
            const auto nr = static_cast<double>(n - p);
            const double sse_l = sum2_l - sum_l * sum_l / nl;
            const double sse_r = (sum2_r - sum2_l) - (sum_r - sum_l) * (sum_r - sum_l) / nr;
            const double score = sse_l + sse_r;
            if (!best.found || score < best.score) {
                best.found = true;
                best.feature = feature;
                best.threshold = va + (vb - va) / 2.0;
                best.score = score;
            }
        }
    }

    int grow(Tree& tree, const std::vector<std::size_t>& indices, int depth) {
        const int node_id = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();

        const bool depth_capped = max_depth_ > 0 && depth >= max_depth_;
        if (depth_capped || indices.size() < 2 * static_cast<std::size_t>(min_leaf_) ||
            indices.size() < 2 || is_pure(indices)) {
            tree.nodes[static_cast<std::size_t>(node_id)].leaf = leaf_value(indices);
            return node_id;
        }

        const SplitChoice split = best_split(indices);
        if (!split.found || node_impurity(indices) - split.score <= kMinGain) {
            tree.nodes[static_cast<std::size_t>(node_id)].leaf = leaf_value(indices);
            return node_id;
        }

        std::vector<std::size_t> left, right;
        for (std::size_t i : indices) {
            if (rows_(static_cast<Eigen::Index>(i), split.feature) <= split.threshold) {
                left.push_back(i);
            } else {
                right.push_back(i);
            }
        }
        const int left_id = grow(tree, left, depth + 1);
        const int right_id = grow(tree, right, depth + 1);
        TreeNode& node = tree.nodes[static_cast<std::size_t>(node_id)];
        node.feature = split.feature;
        node.threshold = split.threshold;
        node.left = left_id;
        node.right = right_id;
        return node_id;
    }

    const Eigen::MatrixXd& rows_;
    const std::vector<int>* labels_ = nullptr;
    const Eigen::VectorXd* targets_ = nullptr;
    int num_classes_ = 0;
    int leaf_class_ = 0;
    int max_depth_;
    int min_leaf_;
    int max_features_;
    Rng& rng_;
};

} // namespace

const Eigen::VectorXd& Tree::leaf_for(const Eigen::Ref<const Eigen::RowVectorXd>& row) const {
    int node = 0;
    while (nodes[static_cast<std::size_t>(node)].feature >= 0) {
        const TreeNode& cur = nodes[static_cast<std::size_t>(node)];
        node = (row(cur.feature) <= cur.threshold) ? cur.left : cur.right;
    }
    return nodes[static_cast<std::size_t>(node)].leaf;
}

TreeEnsembleModel train_random_forest(const FeatureMatrix& data, const RandomForestParams& params,
                                      std::uint64_t seed) {
    validate_features(data);
    if (data.num_classes() < 2) throw DataError("train_random_forest: need at least 2 classes");
    if (params.n_trees < 1) throw DataError("train_random_forest: n_trees must be >= 1");
    if (params.max_depth < 0) throw DataError("train_random_forest: max_depth must be >= 0");
    if (params.min_leaf < 1) throw DataError("train_random_forest: min_leaf must be >= 1");
    if (params.max_features < 0) throw DataError("train_random_forest: max_features must be >= 0");

    const auto n = static_cast<std::size_t>(data.n());
    const int d = static_cast<int>(data.dim());
    const int per_split = (params.max_features > 0)
                              ? std::min(params.max_features, d)
                              : static_cast<int>(std::ceil(std::sqrt(static_cast<double>(d))));

    TreeEnsembleModel model;
    model.kind = EnsembleKind::RandomForest;
    model.classes = data.classes;
    model.dim = d;
    model.trees.reserve(static_cast<std::size_t>(params.n_trees));
    for (int t = 0; t < params.n_trees; ++t) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
        std::vector<std::size_t> sample(n);
        if (params.n_trees == 1) {
            // Bagging with a single bag only discards data; a lone tree trains
            // on the full set so it can realize the CART memorization bound.
            std::iota(sample.begin(), sample.end(), std::size_t{0});
        } else {
            for (std::size_t i = 0; i < n; ++i) sample[i] = rng.next_index(n);
        }
        TreeBuilder builder(data.rows, params.max_depth, params.min_leaf, per_split, rng);
        model.trees.push_back(builder.build_classification(sample, data.labels, data.num_classes()));
    }
    return model;
}

TreeEnsembleModel train_gradient_boost(const FeatureMatrix& data, const GradBoostParams& params,
                                       std::uint64_t seed) {
    (void)seed; // no subsampling anywhere, so boosting is already deterministic
    validate_features(data);
    const int k = data.num_classes();
    if (k < 2) throw DataError("train_gradient_boost: need at least 2 classes");
    if (params.n_rounds < 0) throw DataError("train_gradient_boost: n_rounds must be >= 0");
    if (!(params.shrinkage > 0.0 && params.shrinkage <= 1.0)) {
        throw DataError("train_gradient_boost: shrinkage must be in (0, 1]");
    }
    if (params.max_depth < 1) throw DataError("train_gradient_boost: max_depth must be >= 1");

    const auto n = data.n();
    Eigen::VectorXd priors = Eigen::VectorXd::Zero(k);
    for (int y : data.labels) priors(y) += 1.0;
    for (int cls = 0; cls < k; ++cls) {
        if (priors(cls) == 0.0) {
            throw DataError("train_gradient_boost: class without examples: " + data.classes[static_cast<std::size_t>(cls)]);
        }
    }
    priors /= static_cast<double>(n);

    TreeEnsembleModel model;
    model.kind = EnsembleKind::GradBoost;
    model.classes = data.classes;
    model.dim = static_cast<int>(data.dim());
    model.shrinkage = params.shrinkage;
    model.base_score = priors.array().log();

    Eigen::MatrixXd scores(n, k);
    scores.rowwise() = model.base_score.transpose();

    std::vector<std::size_t> all(static_cast<std::size_t>(n));
    std::iota(all.begin(), all.end(), std::size_t{0});
    Rng rng(0); // unused: boosting trees consider every feature

    for (int round = 0; round < params.n_rounds; ++round) {
        const Eigen::MatrixXd probs = softmax_rows(scores);
        for (int cls = 0; cls < k; ++cls) {
            Eigen::VectorXd residual(n);
            for (Eigen::Index i = 0; i < n; ++i) {
                const double target = (data.labels[static_cast<std::size_t>(i)] == cls) ? 1.0 : 0.0;
                residual(i) = target - probs(i, cls);
            }
            TreeBuilder builder(data.rows, params.max_depth, 1, 0, rng);
            Tree tree = builder.build_regression(all, residual, cls, k);
            // Apply shrinkage inside the stored leaves so inference just sums.
            for (auto& node : tree.nodes) {
                if (node.feature < 0) node.leaf *= params.shrinkage;
            }
            for (Eigen::Index i = 0; i < n; ++i) {
                scores.row(i) += tree.leaf_for(data.rows.row(i)).transpose();
            }
            model.trees.push_back(std::move(tree));
        }
    }
    return model;
}

Eigen::MatrixXd ensemble_scores(const TreeEnsembleModel& model, const Eigen::MatrixXd& rows) {
    if (static_cast<int>(rows.cols()) != model.dim) {
        throw DataError("tree ensemble: feature dimension mismatch");
    }
    const auto k = static_cast<Eigen::Index>(model.classes.size());
    Eigen::MatrixXd scores(rows.rows(), k);
    if (model.kind == EnsembleKind::GradBoost) {
        scores.rowwise() = model.base_score.transpose();
    } else {
        scores.setZero();
    }
    for (const auto& tree : model.trees) {
        for (Eigen::Index i = 0; i < rows.rows(); ++i) {
            scores.row(i) += tree.leaf_for(rows.row(i)).transpose();
        }
    }
    if (model.kind == EnsembleKind::RandomForest && !model.trees.empty()) {
        scores /= static_cast<double>(model.trees.size());
    }
    return scores;
}

std::vector<int> predict(const TreeEnsembleModel& model, const Eigen::MatrixXd& rows) {
    return argmax_rows(ensemble_scores(model, rows));
}

} // namespace fewlabel
