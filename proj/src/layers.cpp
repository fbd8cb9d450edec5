#include "fewlabel/layers.hpp"

#include <cmath>
#include <unordered_set>

#include <json.hpp>

#include "fewlabel/errors.hpp"
#include "fewlabel/io.hpp"

namespace fewlabel {

LayerStrategy parse_layer_strategy(const std::string& name) {
    if (name == "first") return LayerStrategy::First;
    if (name == "last") return LayerStrategy::Last;
    if (name == "concat4") return LayerStrategy::ConcatLast4;
    throw DataError("unknown layer strategy: " + name + " (expected first|last|concat4)");
}

std::string layer_strategy_name(LayerStrategy strategy) {
    switch (strategy) {
        case LayerStrategy::First: return "first";
        case LayerStrategy::Last: return "last";
        case LayerStrategy::ConcatLast4: return "concat4";
    }
    throw DataError("invalid layer strategy value");
}

Eigen::VectorXd select_layers(const LayerFeatures& features, LayerStrategy strategy) {
    const std::size_t n = features.layers.size();
    if (n == 0) throw DataError("no layers for document " + features.id);
    const Eigen::Index dim = features.layers[0].size();
    for (const auto& layer : features.layers) {
        if (layer.size() != dim) throw DataError("inconsistent layer dimensions for document " + features.id);
    }
    switch (strategy) {
        case LayerStrategy::First:
            return features.layers.front();
        case LayerStrategy::Last:
            return features.layers.back();
        case LayerStrategy::ConcatLast4: {
            if (n < 4) {
                throw DataError("concat4 needs at least 4 layers, document " + features.id +
                                " has " + std::to_string(n));
            }
            Eigen::VectorXd out(4 * dim);
            for (int k = 0; k < 4; ++k) {
                out.segment(k * dim, dim) = features.layers[n - 1 - k];
            }
            return out;
        }
    }
    throw DataError("invalid layer strategy value");
}

std::vector<LayerFeatures> load_layer_features(const std::string& path) {
    const auto lines = read_lines(path);
    std::vector<LayerFeatures> result;
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const std::string where = path + ":" + std::to_string(i + 1);
        nlohmann::json j = nlohmann::json::parse(lines[i], nullptr, false);
        if (j.is_discarded() || !j.is_object()) throw DataError(where + ": malformed JSON record");
        if (!j.contains("id") || !j["id"].is_string()) throw DataError(where + ": missing string field \"id\"");
        if (!j.contains("layers") || !j["layers"].is_array() || j["layers"].empty()) {
            throw DataError(where + ": missing non-empty array field \"layers\"");
        }

        LayerFeatures f;
        f.id = j["id"].get<std::string>();
        if (!seen.insert(f.id).second) throw DataError(where + ": duplicate id " + f.id);

        Eigen::Index dim = -1;
        for (const auto& layer : j["layers"]) {
            if (!layer.is_array() || layer.empty()) throw DataError(where + ": each layer must be a non-empty array");
            Eigen::VectorXd v(layer.size());
            for (std::size_t k = 0; k < layer.size(); ++k) {
                if (!layer[k].is_number()) throw DataError(where + ": non-numeric layer value");
                v(static_cast<Eigen::Index>(k)) = layer[k].get<double>();
                if (!std::isfinite(v(static_cast<Eigen::Index>(k)))) {
                    throw DataError(where + ": non-finite layer value");
                }
            }
            if (dim < 0) {
                dim = v.size();
            } else if (v.size() != dim) {
                throw DataError(where + ": inconsistent layer dimensions");
            }
            f.layers.push_back(std::move(v));
        }
        result.push_back(std::move(f));
    }
    return result;
}

} // namespace fewlabel
