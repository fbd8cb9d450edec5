#include "fewlabel/grid.hpp"

#include <cmath>
#include <set>

#include "fewlabel/errors.hpp"
#include "fewlabel/rng.hpp"

namespace fewlabel {

namespace {

int as_int(double v, const std::string& name) {
    const double r = std::llround(v);
    if (r != v) throw DataError("parameter " + name + " must be an integer, got " + std::to_string(v));
    return static_cast<int>(r);
}

double get(const ParamMap& params, const ParamMap& defaults, const std::string& name) {
    auto it = params.find(name);
    if (it != params.end()) return it->second;
    return defaults.at(name);
}

void check_known(const ParamMap& params, const ParamMap& defaults, ModelKind kind) {
    for (const auto& [name, value] : params) {
        (void)value;
        if (defaults.find(name) == defaults.end()) {
            throw DataError("unknown parameter for " + model_kind_name(kind) + ": " + name);
        }
    }
}

} // namespace

ParamMap default_params(ModelKind kind) {
    switch (kind) {
        case ModelKind::LogReg:
            return {{"l2", 0.0}, {"epochs", 200}, {"lr", 0.05}, {"batch", 32}};
        case ModelKind::Svm:
            return {{"C", 1.0}, {"epochs", 200}, {"lr", 0.05}};
        case ModelKind::RandomForest:
            return {{"n_trees", 100}, {"max_depth", 0}, {"min_leaf", 1}, {"max_features", 0}};
        case ModelKind::GradBoost:
            return {{"n_rounds", 100}, {"shrinkage", 0.1}, {"max_depth", 3}};
    }
    throw DataError("invalid model kind value");
}

GridSpec default_grid(ModelKind kind) {
    GridSpec grid;
    switch (kind) {
        case ModelKind::LogReg:
            grid.params = {{"l2", {1e-4, 1e-3, 1e-2, 1e-1}}};
            break;
        case ModelKind::Svm:
            grid.params = {{"C", {0.1, 1.0, 10.0}}};
            break;
        case ModelKind::RandomForest:
            grid.params = {{"n_trees", {100, 300}}, {"max_depth", {8, 16, 0}}};
            break;
        case ModelKind::GradBoost:
            grid.params = {{"shrinkage", {0.05, 0.1}}, {"n_rounds", {100, 200}}, {"max_depth", {2, 3}}};
            break;
    }
    return grid;
}

Model train_model(ModelKind kind, const FeatureMatrix& data, const ParamMap& params,
                  std::uint64_t seed) {
    const ParamMap defaults = default_params(kind);
    check_known(params, defaults, kind);
    switch (kind) {
        case ModelKind::LogReg:
            return train_logreg(data, get(params, defaults, "l2"),
                                as_int(get(params, defaults, "epochs"), "epochs"),
                                get(params, defaults, "lr"),
                                as_int(get(params, defaults, "batch"), "batch"), seed);
        case ModelKind::Svm:
            return train_svm(data, get(params, defaults, "C"),
                             as_int(get(params, defaults, "epochs"), "epochs"),
                             get(params, defaults, "lr"), seed);
        case ModelKind::RandomForest: {
            RandomForestParams p;
            p.n_trees = as_int(get(params, defaults, "n_trees"), "n_trees");
            p.max_depth = as_int(get(params, defaults, "max_depth"), "max_depth");
            p.min_leaf = as_int(get(params, defaults, "min_leaf"), "min_leaf");
            p.max_features = as_int(get(params, defaults, "max_features"), "max_features");
            return train_random_forest(data, p, seed);
        }
        case ModelKind::GradBoost: {
            GradBoostParams p;
            p.n_rounds = as_int(get(params, defaults, "n_rounds"), "n_rounds");
            p.shrinkage = get(params, defaults, "shrinkage");
            p.max_depth = as_int(get(params, defaults, "max_depth"), "max_depth");
            return train_gradient_boost(data, p, seed);
        }
    }
    throw DataError("invalid model kind value");
}

std::vector<int> stratified_folds(const std::vector<int>& labels,
                                  const std::vector<std::string>& classes, int folds,
                                  std::uint64_t seed) {
    if (folds < 2) throw DataError("cross-validation needs at least 2 folds");
    std::vector<std::vector<std::size_t>> per_class(classes.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const int y = labels[i];
        if (y < 0 || y >= static_cast<int>(classes.size())) {
            throw DataError("stratified_folds: label index out of range");
        }
        per_class[static_cast<std::size_t>(y)].push_back(i);
    }

    std::string deficient;
    for (std::size_t k = 0; k < per_class.size(); ++k) {
        if (per_class[k].size() < static_cast<std::size_t>(folds)) {
            if (!deficient.empty()) deficient += ", ";
            deficient += classes[k] + " (" + std::to_string(per_class[k].size()) + " < " +
                         std::to_string(folds) + ")";
        }
    }
    if (!deficient.empty()) {
        throw DataError("not enough documents per class for " + std::to_string(folds) +
                        " folds: " + deficient);
    }

    Rng rng(seed);
    std::vector<int> fold(labels.size(), -1);
    for (auto& members : per_class) {
        rng.shuffle(members);
        for (std::size_t j = 0; j < members.size(); ++j) {
            fold[members[j]] = static_cast<int>(j % static_cast<std::size_t>(folds));
        }
    }
    return fold;
}

GridSearchOutcome grid_search_cv(ModelKind kind, const FeatureMatrix& data, const GridSpec& grid) {
    validate_features(data);
    if (grid.params.empty()) throw DataError("grid search: empty grid");
    {
        std::set<std::string> names;
        for (const auto& [name, values] : grid.params) {
            if (values.empty()) throw DataError("grid search: empty value list for " + name);
            if (!names.insert(name).second) throw DataError("grid search: duplicate parameter " + name);
        }
    }

    const std::vector<int> fold = stratified_folds(data.labels, data.classes, grid.folds, grid.seed);
    const auto n = static_cast<std::size_t>(data.n());

    std::size_t total = 1;
    for (const auto& [name, values] : grid.params) {
        (void)name;
        total *= values.size();
    }

    GridSearchOutcome outcome;
    outcome.table.reserve(total);
    std::size_t best_index = 0;
    for (std::size_t config = 0; config < total; ++config) {
        // Mixed-radix decode; the last declared parameter varies fastest.
        ParamMap params;
        std::size_t rem = config;
        for (std::size_t p = grid.params.size(); p-- > 0;) {
            const auto& [name, values] = grid.params[p];
            params[name] = values[rem % values.size()];
            rem /= values.size();
        }

        double sum = 0.0, sum2 = 0.0;
        for (int f = 0; f < grid.folds; ++f) {
            std::vector<std::size_t> train_idx, valid_idx;
            for (std::size_t i = 0; i < n; ++i) {
                (fold[i] == f ? valid_idx : train_idx).push_back(i);
            }
            const FeatureMatrix train = subset_features(data, train_idx);
            const FeatureMatrix valid = subset_features(data, valid_idx);
            const Model model = train_model(kind, train, params, grid.seed);
            const std::vector<int> pred = model_predict(model, valid.rows);
            std::size_t hits = 0;
            for (std::size_t i = 0; i < valid_idx.size(); ++i) {
                if (pred[i] == valid.labels[i]) ++hits;
            }
            const double acc = static_cast<double>(hits) / static_cast<double>(valid_idx.size());
            sum += acc;
            sum2 += acc * acc;
        }
        const double mean = sum / grid.folds;
        const double variance = std::max(0.0, sum2 / grid.folds - mean * mean);
        outcome.table.push_back(GridResult{params, mean, std::sqrt(variance)});
        if (outcome.table[config].mean_accuracy > outcome.table[best_index].mean_accuracy) {
            best_index = config;
        }
    }
    outcome.best = outcome.table[best_index].params;
    return outcome;
}

} // namespace fewlabel
