#include "fewlabel/features_io.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <set>

#include <json.hpp>

#include "fewlabel/errors.hpp"
#include "fewlabel/io.hpp"

namespace fewlabel {

namespace {

std::string meta_path(const std::string& path) { return path + ".meta.json"; }

} // namespace

void write_features(const std::string& path, const FeatureFile& features) {
    const auto n = static_cast<std::size_t>(features.rows.rows());
    if (features.ids.size() != n || features.labels.size() != n || features.labeled.size() != n) {
        throw DataError("write_features: id/label/row count mismatch");
    }
    std::string body;
    for (std::size_t i = 0; i < n; ++i) {
        nlohmann::json line;
        line["id"] = features.ids[i];
        if (features.labeled[i]) {
            line["label"] = features.labels[i];
        } else {
            line["label"] = nullptr;
        }
        nlohmann::json vec = nlohmann::json::array();
        for (Eigen::Index j = 0; j < features.rows.cols(); ++j) {
            vec.push_back(features.rows(static_cast<Eigen::Index>(i), j));
        }
        line["vector"] = vec;
        body += line.dump() + "\n";
    }
    write_text_file(path, body);

    nlohmann::json meta;
    meta["schema_version"] = 1;
    meta["dim"] = features.rows.cols();
    meta["featurizer"] = {{"kind", features.featurizer.kind},
                          {"embeddings", features.featurizer.embeddings},
                          {"strategy", features.featurizer.strategy}};
    write_text_file(meta_path(path), meta.dump(2) + "\n");
}

FeatureFile load_features(const std::string& path) {
    const std::vector<std::string> lines = read_lines(path);
    FeatureFile features;
    std::set<std::string> seen;
    Eigen::Index dim = -1;
    std::vector<std::vector<double>> vectors;
    for (std::size_t n = 0; n < lines.size(); ++n) {
        if (lines[n].empty()) continue;
        const std::string where = path + ":" + std::to_string(n + 1);
        nlohmann::json line;
        try {
            line = nlohmann::json::parse(lines[n]);
        } catch (const nlohmann::json::exception& e) {
            throw DataError(where + ": malformed JSON: " + e.what());
        }
        if (!line.is_object() || !line.contains("id") || !line["id"].is_string() ||
            !line.contains("vector") || !line["vector"].is_array()) {
            throw DataError(where + ": expected {\"id\",\"label\",\"vector\"}");
        }
        const std::string id = line["id"].get<std::string>();
        if (id.empty()) throw DataError(where + ": empty id");
        if (!seen.insert(id).second) throw DataError(where + ": duplicate id " + id);

        std::string label;
        bool labeled = false;
        if (line.contains("label") && !line["label"].is_null()) {
            if (!line["label"].is_string()) throw DataError(where + ": label must be string or null");
            label = line["label"].get<std::string>();
            if (label.empty()) throw DataError(where + ": empty label");
            labeled = true;
        }

        std::vector<double> vec;
        vec.reserve(line["vector"].size());
        for (const auto& v : line["vector"]) {
            if (!v.is_number()) throw DataError(where + ": non-numeric vector component");
            vec.push_back(v.get<double>());
            if (!std::isfinite(vec.back())) throw DataError(where + ": non-finite vector component");
        }
        if (vec.empty()) throw DataError(where + ": empty vector");
        if (dim < 0) {
            dim = static_cast<Eigen::Index>(vec.size());
        } else if (static_cast<Eigen::Index>(vec.size()) != dim) {
            throw DataError(where + ": vector length " + std::to_string(vec.size()) +
                            " differs from first row's " + std::to_string(dim));
        }
        features.ids.push_back(id);
        features.labels.push_back(label);
        features.labeled.push_back(labeled);
        vectors.push_back(std::move(vec));
    }
    if (vectors.empty()) throw DataError(path + ": no feature rows");

    features.rows.resize(static_cast<Eigen::Index>(vectors.size()), dim);
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        for (Eigen::Index j = 0; j < dim; ++j) {
            features.rows(static_cast<Eigen::Index>(i), j) = vectors[i][static_cast<std::size_t>(j)];
        }
    }

    if (std::filesystem::exists(meta_path(path))) {
        nlohmann::json meta;
        try {
            meta = nlohmann::json::parse(read_text_file(meta_path(path)));
        } catch (const nlohmann::json::exception& e) {
            throw DataError(meta_path(path) + ": malformed JSON: " + std::string(e.what()));
        }
        if (meta.contains("featurizer") && meta["featurizer"].is_object()) {
            const auto& f = meta["featurizer"];
            features.featurizer.kind = f.value("kind", std::string("none"));
            features.featurizer.embeddings = f.value("embeddings", std::string());
            features.featurizer.strategy = f.value("strategy", std::string());
        }
        if (meta.contains("dim") && meta["dim"].is_number_integer() &&
            meta["dim"].get<Eigen::Index>() != dim) {
            throw DataError(meta_path(path) + ": dim disagrees with " + path);
        }
    }
    return features;
}

FeatureMatrix to_feature_matrix(const FeatureFile& features) {
    for (std::size_t i = 0; i < features.ids.size(); ++i) {
        if (!features.labeled[i]) {
            throw DataError("features: document " + features.ids[i] +
                            " has no label; a labeled set is required here");
        }
    }
    std::set<std::string> distinct(features.labels.begin(), features.labels.end());
    FeatureMatrix data;
    data.classes.assign(distinct.begin(), distinct.end());
    std::map<std::string, int> index;
    for (std::size_t c = 0; c < data.classes.size(); ++c) {
        index[data.classes[c]] = static_cast<int>(c);
    }
    data.rows = features.rows;
    data.labels.reserve(features.labels.size());
    for (const auto& label : features.labels) data.labels.push_back(index.at(label));
    return data;
}

} // namespace fewlabel
