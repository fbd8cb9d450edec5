#include "fewlabel/model.hpp"

#include "fewlabel/errors.hpp"

namespace fewlabel {

ModelKind parse_model_kind(const std::string& name) {
    if (name == "logreg") return ModelKind::LogReg;
    if (name == "svm") return ModelKind::Svm;
    if (name == "rf") return ModelKind::RandomForest;
    if (name == "gb") return ModelKind::GradBoost;
    throw DataError("unknown model kind: " + name + " (expected logreg|svm|rf|gb)");
}

std::string model_kind_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::LogReg: return "logreg";
        case ModelKind::Svm: return "svm";
        case ModelKind::RandomForest: return "rf";
        case ModelKind::GradBoost: return "gb";
    }
    throw DataError("invalid model kind value");
}

ModelKind model_kind(const Model& model) {
    if (const auto* linear = std::get_if<LinearModel>(&model)) {
        return linear->kind == LinearKind::LogReg ? ModelKind::LogReg : ModelKind::Svm;
    }
    const auto& trees = std::get<TreeEnsembleModel>(model);
    return trees.kind == EnsembleKind::RandomForest ? ModelKind::RandomForest : ModelKind::GradBoost;
}

const std::vector<std::string>& model_classes(const Model& model) {
    if (const auto* linear = std::get_if<LinearModel>(&model)) return linear->classes;
    return std::get<TreeEnsembleModel>(model).classes;
}

int model_dim(const Model& model) {
    if (const auto* linear = std::get_if<LinearModel>(&model)) {
        return static_cast<int>(linear->weights.cols());
    }
    return std::get<TreeEnsembleModel>(model).dim;
}

Eigen::MatrixXd model_scores(const Model& model, const Eigen::MatrixXd& rows) {
    if (const auto* linear = std::get_if<LinearModel>(&model)) {
        return linear->kind == LinearKind::LogReg ? predict_proba(*linear, rows)
                                                  : decision_scores(*linear, rows);
    }
    return ensemble_scores(std::get<TreeEnsembleModel>(model), rows);
}

std::vector<int> model_predict(const Model& model, const Eigen::MatrixXd& rows) {
    return argmax_rows(model_scores(model, rows));
}

} // namespace fewlabel
