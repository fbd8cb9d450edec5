#pragma once

#include <string>

#include "fewlabel/features_io.hpp"
#include "fewlabel/grid.hpp"
#include "fewlabel/model.hpp"

namespace fewlabel {

struct SavedModel {
    Model model;
    ParamMap params; // hyper-parameters the model was trained with
    FeaturizerInfo featurizer;
};

// JSON model file: {"schema_version":1, "kind", "classes", "dim", "params",
// "payload", "featurizer"}. Linear payloads store weights/bias arrays; tree
// payloads store nested {"feature","threshold","left","right"}/{"leaf":[K]}
// nodes. Numbers round-trip exactly (shortest-decimal serialization).
void save_model(const std::string& path, const SavedModel& saved);
SavedModel load_model(const std::string& path);

} // namespace fewlabel
