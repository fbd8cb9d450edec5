#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace fewlabel {

// All K classes ordered by descending score; exact ties keep the lower class
// index first, so rankings are deterministic.
struct PredRanking {
    std::string id;
    std::vector<std::pair<std::string, double>> ranked;
};

PredRanking make_ranking(const std::string& id, const std::vector<std::string>& classes,
                         const Eigen::VectorXd& scores);

struct ClassMetrics {
    std::string name;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    long long support = 0; // gold examples of this class
};

// Fraction of documents whose gold class appears among the top min(k, K)
// entries of their ranking. DataError when a ranking id has no gold label.
double accuracy_at_k(const std::vector<PredRanking>& rankings,
                     const std::map<std::string, std::string>& gold, int k);

struct EvalSummary {
    std::vector<ClassMetrics> per_class; // in `classes` order
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double macro_f1 = 0.0;
    double accuracy = 0.0;
};

// Confusion-matrix metrics with the 0/0 -> 0 convention, macro values as
// unweighted means over all listed classes (predicted or not). The id sets of
// preds and gold must match exactly; class names must come from `classes`.
EvalSummary per_class_metrics(const std::map<std::string, std::string>& preds,
                              const std::map<std::string, std::string>& gold,
                              const std::vector<std::string>& classes);

// Serialized report: {"accuracy", "acc_at": {"1":..., ...}, "macro":
// {"precision","recall","f1"}, "per_class": [{...}]}. acc_at is keyed by the
// decimal k values.
std::string evaluation_report_json(const EvalSummary& summary,
                                   const std::map<int, double>& acc_at);

} // namespace fewlabel
