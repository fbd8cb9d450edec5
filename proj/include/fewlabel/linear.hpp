#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace fewlabel {

// Dense feature rows with integer class labels indexing `classes`.
struct FeatureMatrix {
    Eigen::MatrixXd rows;   // n x d
    std::vector<int> labels; // n entries in [0, classes.size())
    std::vector<std::string> classes;

    Eigen::Index n() const { return rows.rows(); }
    Eigen::Index dim() const { return rows.cols(); }
    int num_classes() const { return static_cast<int>(classes.size()); }
};

// Shape/label/finiteness checks shared by every trainer; DataError on failure.
void validate_features(const FeatureMatrix& data);

FeatureMatrix subset_features(const FeatureMatrix& data, const std::vector<std::size_t>& indices);

enum class LinearKind { LogReg, Svm };

struct LinearModel {
    LinearKind kind = LinearKind::LogReg;
    Eigen::MatrixXd weights; // K x d
    Eigen::VectorXd bias;    // K
    double l2 = 0.0;         // logreg regularization strength used at training
    std::vector<std::string> classes;
};

struct LossGrad {
    double loss = 0.0;
    Eigen::MatrixXd d_weights;
    Eigen::VectorXd d_bias;
};

// X W^T + b, the raw decision scores.
Eigen::MatrixXd linear_scores(const Eigen::MatrixXd& weights, const Eigen::VectorXd& bias,
                              const Eigen::MatrixXd& rows);

// Numerically stable row-wise softmax; rows sum to 1.
Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& scores);

// Cross-entropy over the rows with kept[i] == true, divided by
// max(1, kept_count); dropped rows contribute nothing to loss or gradient.
// This single implementation backs both the plain and the masked trainer, so
// the two are bit-identical when every row is kept.
LossGrad masked_xent_grad(const Eigen::MatrixXd& probs, const Eigen::MatrixXd& rows,
                          const std::vector<int>& labels, const std::vector<bool>& kept,
                          std::size_t kept_count);

// Mean softmax cross-entropy + (l2/2)*||W||^2 and its gradients.
LossGrad logreg_loss_grad(const Eigen::MatrixXd& weights, const Eigen::VectorXd& bias,
                          const Eigen::MatrixXd& rows, const std::vector<int>& labels, double l2);

// Mini-batch Adam from zero-initialized parameters; epochs=0 returns the zero
// model (uniform probabilities). NumericError if the loss leaves the reals.
LinearModel train_logreg(const FeatureMatrix& data, double l2, int epochs, double learning_rate,
                         int batch_size, std::uint64_t seed);

// One-vs-rest hinge: sum_k [ mean_i max(0, 1 - y_ik s_ik) + ||w_k||^2 / (2C) ].
LossGrad svm_loss_grad(const Eigen::MatrixXd& weights, const Eigen::VectorXd& bias,
                       const Eigen::MatrixXd& rows, const std::vector<int>& labels, double c);

// Full-batch Adam on the hinge subgradient; deterministic (the seed parameter
// is kept for interface symmetry only).
LinearModel train_svm(const FeatureMatrix& data, double c, int epochs, double learning_rate,
                      std::uint64_t seed);

Eigen::MatrixXd decision_scores(const LinearModel& model, const Eigen::MatrixXd& rows);

// Softmax probabilities; DataError for non-logreg models.
Eigen::MatrixXd predict_proba(const LinearModel& model, const Eigen::MatrixXd& rows);

// Row-wise argmax of the decision scores; ties resolve to the lowest index.
std::vector<int> predict(const LinearModel& model, const Eigen::MatrixXd& rows);

// Shared argmax with the lowest-index tie rule.
std::vector<int> argmax_rows(const Eigen::MatrixXd& scores);

} // namespace fewlabel
