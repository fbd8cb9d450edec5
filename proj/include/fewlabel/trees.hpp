#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fewlabel/linear.hpp"

namespace fewlabel {

// Flat binary tree; nodes[0] is the root. feature == -1 marks a leaf, in which
// case `leaf` holds a K-vector score (class proportions for a forest, a scaled
// one-hot residual step for boosting). The split predicate is x[feature] <= threshold.
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    Eigen::VectorXd leaf;
};

struct Tree {
    std::vector<TreeNode> nodes;

    const Eigen::VectorXd& leaf_for(const Eigen::Ref<const Eigen::RowVectorXd>& row) const;
};

enum class EnsembleKind { RandomForest, GradBoost };

struct TreeEnsembleModel {
    EnsembleKind kind = EnsembleKind::RandomForest;
    std::vector<Tree> trees;
    double shrinkage = 0.0;          // boosting only
    Eigen::VectorXd base_score;      // boosting only: log class priors
    int dim = 0;
    std::vector<std::string> classes;
};

struct RandomForestParams {
    int n_trees = 100;
    int max_depth = 0;    // 0 = unbounded
    int min_leaf = 1;
    int max_features = 0; // candidate features per split; 0 = ceil(sqrt(d))
};

// Bagged CART trees, Gini impurity, bootstrap resampling per tree. Leaves
// store class proportions; prediction sums them across trees.
TreeEnsembleModel train_random_forest(const FeatureMatrix& data, const RandomForestParams& params,
                                      std::uint64_t seed);

struct GradBoostParams {
    int n_rounds = 100;
    double shrinkage = 0.1;
    int max_depth = 3;
};

// Multiclass softmax boosting: starts from log class priors, then each round
// fits one squared-error regression tree per class to the residuals
// 1{y_i = k} - p_k(x_i). Leaf values are mean residuals scaled by shrinkage.
TreeEnsembleModel train_gradient_boost(const FeatureMatrix& data, const GradBoostParams& params,
                                       std::uint64_t seed);

// n x K score matrix: mean leaf proportions for a forest, base score plus
// accumulated shrunk leaf steps for boosting.
Eigen::MatrixXd ensemble_scores(const TreeEnsembleModel& model, const Eigen::MatrixXd& rows);

// Row-wise argmax of ensemble_scores, ties to the lowest class index.
std::vector<int> predict(const TreeEnsembleModel& model, const Eigen::MatrixXd& rows);

} // namespace fewlabel
