#pragma once

#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "fewlabel/linear.hpp"
#include "fewlabel/trees.hpp"

namespace fewlabel {

enum class ModelKind { LogReg, Svm, RandomForest, GradBoost };

// Accepts "logreg", "svm", "rf" or "gb".
ModelKind parse_model_kind(const std::string& name);
std::string model_kind_name(ModelKind kind);

using Model = std::variant<LinearModel, TreeEnsembleModel>;

ModelKind model_kind(const Model& model);
const std::vector<std::string>& model_classes(const Model& model);
int model_dim(const Model& model);

// Per-class ranking scores: probabilities for logistic regression, decision
// values for the SVM, ensemble scores for trees. Higher means more likely.
Eigen::MatrixXd model_scores(const Model& model, const Eigen::MatrixXd& rows);

// Row-wise argmax of model_scores with the lowest-index tie rule, shared by
// evaluation, the CLI predictor and the serving endpoint.
std::vector<int> model_predict(const Model& model, const Eigen::MatrixXd& rows);

} // namespace fewlabel
