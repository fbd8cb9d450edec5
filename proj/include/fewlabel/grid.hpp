#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "fewlabel/model.hpp"

namespace fewlabel {

// Hyper-parameter assignment by name; integer-valued parameters are stored as
// exact doubles. Unknown names for a given model kind are rejected.
using ParamMap = std::map<std::string, double>;

struct GridSpec {
    // Declared order matters: the cartesian enumeration varies the last
    // parameter fastest, and ties on mean accuracy keep the earliest config.
    std::vector<std::pair<std::string, std::vector<double>>> params;
    int folds = 5;
    std::uint64_t seed = 0;
};

// The stock search space per model kind.
GridSpec default_grid(ModelKind kind);

// Trains one model of the given kind; missing parameters take the kind's
// defaults (see default_params).
Model train_model(ModelKind kind, const FeatureMatrix& data, const ParamMap& params,
                  std::uint64_t seed);

ParamMap default_params(ModelKind kind);

struct GridResult {
    ParamMap params;
    double mean_accuracy = 0.0;
    double std_accuracy = 0.0;
};

struct GridSearchOutcome {
    ParamMap best;
    std::vector<GridResult> table; // enumeration order
};

// Deterministic stratified fold assignment: per class, indices are shuffled
// with the shared seed and dealt round-robin, so fold sizes per class differ
// by at most one. Classes with fewer members than folds raise DataError
// naming them.
std::vector<int> stratified_folds(const std::vector<int>& labels,
                                  const std::vector<std::string>& classes, int folds,
                                  std::uint64_t seed);

// Exhaustive k-fold cross-validated search over the grid's cartesian product.
// The winner has the strictly highest mean validation accuracy; exact ties go
// to the earlier enumerated config.
GridSearchOutcome grid_search_cv(ModelKind kind, const FeatureMatrix& data, const GridSpec& grid);

} // namespace fewlabel
