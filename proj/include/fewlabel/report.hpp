#pragma once

#include <map>
#include <string>
#include <vector>

namespace fewlabel {

// Per-class human annotation quality from the audit file: accuracy in [0, 1]
// plus how many records were audited.
struct HumanAudit {
    std::map<std::string, double> accuracy;
    std::map<std::string, long long> audited;
};

// Reads a CSV with header "class,human_accuracy,audited_count". Errors carry
// path:line positions.
HumanAudit load_audit_csv(const std::string& path);

struct ComparisonRow {
    std::string class_name;
    double human_acc = 0.0;
    double model_acc = 0.0;
    double delta = 0.0; // model_acc - human_acc
};

// One row per class, sorted by model accuracy descending (ties by class name).
// The class sets of both inputs must match; mismatches raise DataError listing
// the symmetric difference.
std::vector<ComparisonRow> comparison_rows(const std::map<std::string, double>& model_accuracy,
                                           const HumanAudit& audit);

// CSV with header "class,human_acc,model_acc,delta". Numbers use shortest
// round-trip formatting, so parse_comparison_csv reproduces rows exactly.
std::string comparison_csv(const std::vector<ComparisonRow>& rows);
std::vector<ComparisonRow> parse_comparison_csv(const std::string& text);

// Dumbbell chart: one horizontal segment per class in row order, red circle at
// the human accuracy, blue circle at the model accuracy, class labels on the
// left. Fixed 800 x (20*K + 40) canvas.
std::string comparison_svg(const std::vector<ComparisonRow>& rows);

// One line for logs: how many classes each side wins.
std::string comparison_summary(const std::vector<ComparisonRow>& rows);

} // namespace fewlabel
