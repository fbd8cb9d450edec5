#include "fewlabel/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "fewlabel/errors.hpp"

namespace fewlabel {

PredRanking make_ranking(const std::string& id, const std::vector<std::string>& classes,
                         const Eigen::VectorXd& scores) {
    if (scores.size() != static_cast<Eigen::Index>(classes.size())) {
        throw DataError("make_ranking: score/class count mismatch for " + id);
    }
    if (!scores.allFinite()) throw DataError("make_ranking: non-finite score for " + id);

    std::vector<int> order(classes.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return scores(a) > scores(b); // stable keeps lower index first on ties
    });

    PredRanking ranking;
    ranking.id = id;
    ranking.ranked.reserve(classes.size());
    for (int idx : order) {
        ranking.ranked.emplace_back(classes[static_cast<std::size_t>(idx)], scores(idx));
    }
    return ranking;
}

double accuracy_at_k(const std::vector<PredRanking>& rankings,
                     const std::map<std::string, std::string>& gold, int k) {
    if (k < 1) throw DataError("accuracy_at_k: k must be >= 1");
    if (rankings.empty()) throw DataError("accuracy_at_k: no rankings");

    std::size_t hits = 0;
    for (const auto& ranking : rankings) {
        auto it = gold.find(ranking.id);
        if (it == gold.end()) throw DataError("accuracy_at_k: no gold label for " + ranking.id);
        const auto top = std::min<std::size_t>(static_cast<std::size_t>(k), ranking.ranked.size());
        for (std::size_t i = 0; i < top; ++i) {
            if (ranking.ranked[i].first == it->second) {
                ++hits;
                break;
            }
        }
    }
    return static_cast<double>(hits) / static_cast<double>(rankings.size());
}

EvalSummary per_class_metrics(const std::map<std::string, std::string>& preds,
                              const std::map<std::string, std::string>& gold,
                              const std::vector<std::string>& classes) {
    if (classes.empty()) throw DataError("per_class_metrics: empty class list");
    if (gold.empty()) throw DataError("per_class_metrics: empty gold set");
    for (const auto& [id, label] : preds) {
        (void)label;
        if (gold.find(id) == gold.end()) {
            throw DataError("per_class_metrics: prediction for unknown id " + id);
        }
    }
    for (const auto& [id, label] : gold) {
        (void)label;
        if (preds.find(id) == preds.end()) {
            throw DataError("per_class_metrics: missing prediction for " + id);
        }
    }

    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < classes.size(); ++i) index[classes[i]] = i;

    const std::size_t k = classes.size();
    std::vector<long long> tp(k, 0), fp(k, 0), fn(k, 0);
    long long correct = 0;
    for (const auto& [id, gold_label] : gold) {
        const std::string& pred_label = preds.at(id);
        auto git = index.find(gold_label);
        if (git == index.end()) {
            throw DataError("per_class_metrics: unknown gold class " + gold_label);
        }
        auto pit = index.find(pred_label);
        if (pit == index.end()) {
            throw DataError("per_class_metrics: unknown predicted class " + pred_label);
        }
        if (git->second == pit->second) {
            ++tp[git->second];
            ++correct;
        } else {
            ++fn[git->second];
            ++fp[pit->second];
        }
    }

    EvalSummary summary;
    summary.per_class.reserve(k);
    for (std::size_t c = 0; c < k; ++c) {
        ClassMetrics m;
        m.name = classes[c];
        m.support = tp[c] + fn[c];
        const long long denom_p = tp[c] + fp[c];
        const long long denom_r = tp[c] + fn[c];
        m.precision = denom_p > 0 ? static_cast<double>(tp[c]) / static_cast<double>(denom_p) : 0.0;
        m.recall = denom_r > 0 ? static_cast<double>(tp[c]) / static_cast<double>(denom_r) : 0.0;
        m.f1 = (m.precision + m.recall > 0.0)
                   ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
                   : 0.0;
        summary.per_class.push_back(m);
        summary.macro_precision += m.precision;
        summary.macro_recall += m.recall;
        summary.macro_f1 += m.f1;
    }
    summary.macro_precision /= static_cast<double>(k);
    summary.macro_recall /= static_cast<double>(k);
    summary.macro_f1 /= static_cast<double>(k);
    summary.accuracy = static_cast<double>(correct) / static_cast<double>(gold.size());
    return summary;
}

std::string evaluation_report_json(const EvalSummary& summary,
                                   const std::map<int, double>& acc_at) {
    nlohmann::json report;
    report["accuracy"] = summary.accuracy;
    nlohmann::json at = nlohmann::json::object();
    for (const auto& [k, acc] : acc_at) at[std::to_string(k)] = acc;
    report["acc_at"] = at;
    report["macro"] = {{"precision", summary.macro_precision},
                       {"recall", summary.macro_recall},
                       {"f1", summary.macro_f1}};
    nlohmann::json per_class = nlohmann::json::array();
    for (const auto& m : summary.per_class) {
        per_class.push_back({{"class", m.name},
                             {"precision", m.precision},
                             {"recall", m.recall},
                             {"f1", m.f1},
                             {"support", m.support}});
    }
    report["per_class"] = per_class;
    return report.dump(2) + "\n";
}

} // namespace fewlabel
