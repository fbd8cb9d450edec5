#include "fewlabel/model_io.hpp"

#include <cmath>

#include <json.hpp>

#include "fewlabel/errors.hpp"
#include "fewlabel/io.hpp"

namespace fewlabel {

namespace {

nlohmann::json matrix_json(const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& rows, const std::string& what) {
    if (!rows.is_array() || rows.empty()) throw DataError(what + ": expected non-empty array");
    const auto r = static_cast<Eigen::Index>(rows.size());
    if (!rows[0].is_array() || rows[0].empty()) throw DataError(what + ": expected array rows");
    const auto c = static_cast<Eigen::Index>(rows[0].size());
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
        const auto& row = rows[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != c) {
            throw DataError(what + ": ragged rows");
        }
        for (Eigen::Index j = 0; j < c; ++j) {
            const auto& v = row[static_cast<std::size_t>(j)];
            if (!v.is_number()) throw DataError(what + ": non-numeric entry");
            m(i, j) = v.get<double>();
        }
    }
    if (!m.allFinite()) throw DataError(what + ": non-finite entry");
    return m;
}

Eigen::VectorXd vector_from_json(const nlohmann::json& arr, const std::string& what) {
    if (!arr.is_array() || arr.empty()) throw DataError(what + ": expected non-empty array");
    Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const auto& e = arr[static_cast<std::size_t>(i)];
        if (!e.is_number()) throw DataError(what + ": non-numeric entry");
        v(i) = e.get<double>();
    }
    if (!v.allFinite()) throw DataError(what + ": non-finite entry");
    return v;
}

nlohmann::json vector_json(const Eigen::VectorXd& v) {
    nlohmann::json arr = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
    return arr;
}

// Nested preorder serialization mirroring the builder's layout: a node is
// either {"leaf": [...]} or {"feature","threshold","left","right"}.
nlohmann::json node_json(const Tree& tree, int node_id) {
    const TreeNode& node = tree.nodes[static_cast<std::size_t>(node_id)];
    if (node.feature < 0) {
        return {{"leaf", vector_json(node.leaf)}};
    }
    return {{"feature", node.feature},
            {"threshold", node.threshold},
            {"left", node_json(tree, node.left)},
            {"right", node_json(tree, node.right)}};
}

int node_from_json(const nlohmann::json& j, Tree& tree, int dim, Eigen::Index k,
                   const std::string& what) {
    if (!j.is_object()) throw DataError(what + ": tree node must be an object");
    const int node_id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    if (j.contains("leaf")) {
        Eigen::VectorXd leaf = vector_from_json(j["leaf"], what + ": leaf");
        if (leaf.size() != k) throw DataError(what + ": leaf length mismatch");
        tree.nodes[static_cast<std::size_t>(node_id)].leaf = std::move(leaf);
        return node_id;
    }
    if (!j.contains("feature") || !j["feature"].is_number_integer() || !j.contains("threshold") ||
        !j["threshold"].is_number() || !j.contains("left") || !j.contains("right")) {
        throw DataError(what + ": split node needs feature/threshold/left/right");
    }
    const int feature = j["feature"].get<int>();
    if (feature < 0 || feature >= dim) throw DataError(what + ": feature index out of range");
    const double threshold = j["threshold"].get<double>();
    if (!std::isfinite(threshold)) throw DataError(what + ": non-finite threshold");
    const int left = node_from_json(j["left"], tree, dim, k, what);
    const int right = node_from_json(j["right"], tree, dim, k, what);
    TreeNode& node = tree.nodes[static_cast<std::size_t>(node_id)];
    node.feature = feature;
    node.threshold = threshold;
    node.left = left;
    node.right = right;
    return node_id;
}

} // namespace

void save_model(const std::string& path, const SavedModel& saved) {
    nlohmann::json file;
    file["schema_version"] = 1;
    file["kind"] = model_kind_name(model_kind(saved.model));
    file["classes"] = model_classes(saved.model);
    file["dim"] = model_dim(saved.model);
    nlohmann::json params = nlohmann::json::object();
    for (const auto& [name, value] : saved.params) params[name] = value;
    file["params"] = params;
    file["featurizer"] = {{"kind", saved.featurizer.kind},
                          {"embeddings", saved.featurizer.embeddings},
                          {"strategy", saved.featurizer.strategy}};

    nlohmann::json payload;
    if (const auto* linear = std::get_if<LinearModel>(&saved.model)) {
        payload["weights"] = matrix_json(linear->weights);
        payload["bias"] = vector_json(linear->bias);
        payload["l2"] = linear->l2;
    } else {
        const auto& ensemble = std::get<TreeEnsembleModel>(saved.model);
        nlohmann::json trees = nlohmann::json::array();
        for (const auto& tree : ensemble.trees) trees.push_back(node_json(tree, 0));
        payload["trees"] = trees;
        if (ensemble.kind == EnsembleKind::GradBoost) {
            payload["shrinkage"] = ensemble.shrinkage;
            payload["base_score"] = vector_json(ensemble.base_score);
        }
    }
    file["payload"] = payload;
    write_text_file(path, file.dump(2) + "\n");
}

SavedModel load_model(const std::string& path) {
    nlohmann::json file;
    try {
        file = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path + ": malformed JSON: " + std::string(e.what()));
    }
    if (!file.is_object()) throw DataError(path + ": expected a JSON object");
    if (file.value("schema_version", 0) != 1) {
        throw DataError(path + ": unsupported schema_version");
    }
    for (const char* key : {"kind", "classes", "dim", "payload"}) {
        if (!file.contains(key)) throw DataError(path + ": missing field " + std::string(key));
    }
    const ModelKind kind = parse_model_kind(file["kind"].get<std::string>());
    if (!file["classes"].is_array() || file["classes"].size() < 2) {
        throw DataError(path + ": classes must list at least 2 names");
    }
    std::vector<std::string> classes;
    for (const auto& c : file["classes"]) {
        if (!c.is_string()) throw DataError(path + ": class names must be strings");
        classes.push_back(c.get<std::string>());
    }
    const int dim = file["dim"].get<int>();
    if (dim < 1) throw DataError(path + ": dim must be >= 1");
    const auto k = static_cast<Eigen::Index>(classes.size());

    SavedModel saved;
    if (file.contains("params")) {
        for (const auto& [name, value] : file["params"].items()) {
            if (!value.is_number()) throw DataError(path + ": non-numeric param " + name);
            saved.params[name] = value.get<double>();
        }
    }
    if (file.contains("featurizer") && file["featurizer"].is_object()) {
        const auto& f = file["featurizer"];
        saved.featurizer.kind = f.value("kind", std::string("none"));
        saved.featurizer.embeddings = f.value("embeddings", std::string());
        saved.featurizer.strategy = f.value("strategy", std::string());
    }

    const nlohmann::json& payload = file["payload"];
    if (kind == ModelKind::LogReg || kind == ModelKind::Svm) {
        LinearModel linear;
        linear.kind = (kind == ModelKind::LogReg) ? LinearKind::LogReg : LinearKind::Svm;
        linear.classes = classes;
        linear.weights = matrix_from_json(payload.at("weights"), path + ": weights");
        linear.bias = vector_from_json(payload.at("bias"), path + ": bias");
        linear.l2 = payload.value("l2", 0.0);
        if (linear.weights.rows() != k || linear.weights.cols() != dim || linear.bias.size() != k) {
            throw DataError(path + ": weight shape disagrees with kind/classes/dim");
        }
        saved.model = std::move(linear);
    } else {
        TreeEnsembleModel ensemble;
        ensemble.kind =
            (kind == ModelKind::RandomForest) ? EnsembleKind::RandomForest : EnsembleKind::GradBoost;
        ensemble.classes = classes;
        ensemble.dim = dim;
        if (!payload.contains("trees") || !payload["trees"].is_array()) {
            throw DataError(path + ": payload.trees must be an array");
        }
        for (const auto& t : payload["trees"]) {
            Tree tree;
            node_from_json(t, tree, dim, k, path);
            ensemble.trees.push_back(std::move(tree));
        }
        if (ensemble.kind == EnsembleKind::GradBoost) {
            ensemble.shrinkage = payload.value("shrinkage", 0.1);
            ensemble.base_score = vector_from_json(payload.at("base_score"), path + ": base_score");
            if (ensemble.base_score.size() != k) {
                throw DataError(path + ": base_score length mismatch");
            }
            if (ensemble.trees.size() % classes.size() != 0) {
                throw DataError(path + ": boosted tree count must be a multiple of K");
            }
        } else if (ensemble.trees.empty()) {
            throw DataError(path + ": forest has no trees");
        }
        saved.model = std::move(ensemble);
    }
    return saved;
}

} // namespace fewlabel
