#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

namespace fewlabel {

// Pre-computed per-document hidden states exported from an external encoder,
// ordered bottom (index 0) to top.
struct LayerFeatures {
    std::string id;
    std::vector<Eigen::VectorXd> layers; // all the same dimension
};

enum class LayerStrategy {
    First,      // bottom layer
    Last,       // top layer
    ConcatLast4 // last four layers concatenated top-down
};

// Accepts "first", "last" or "concat4".
LayerStrategy parse_layer_strategy(const std::string& name);
std::string layer_strategy_name(LayerStrategy strategy);

// Reduces the layer stack to a single feature vector. ConcatLast4 requires at
// least four layers and yields 4x the layer dimension.
Eigen::VectorXd select_layers(const LayerFeatures& features, LayerStrategy strategy);

// JSONL rows {"id": ..., "layers": [[...], ...]}; validates non-empty stacks,
// uniform dimensions and finite values.
std::vector<LayerFeatures> load_layer_features(const std::string& path);

} // namespace fewlabel
