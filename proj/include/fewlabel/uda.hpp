#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fewlabel/linear.hpp"

namespace fewlabel {

// Training-signal annealing: how fast supervised examples the model already
// predicts confidently are released back into the loss.
enum class TsaSchedule { None, Linear, Exp, Log };

// Accepts "none", "linear", "exp" or "log".
TsaSchedule parse_tsa(const std::string& name);
std::string tsa_name(TsaSchedule schedule);

// Confidence threshold eta(t) = alpha(t) + (1 - alpha(t)) / K, rising from 1/K
// at t=0 to exactly 1 at t=T. alpha is t/T (Linear), 1-e^(-5t/T) (Log) or
// e^(5(t/T-1)) (Exp); the Exp and Log curves are clamped against the linear
// one near the ends, which keeps the boundary values exact and preserves
// Exp <= Linear <= Log across the whole range. None holds eta at 1.
double tsa_threshold(TsaSchedule schedule, long long t, long long total_steps, int num_classes);

struct TsaLossResult {
    double loss = 0.0;       // mean over kept rows (0 when none survive)
    std::vector<bool> kept;  // kept[i]: probs(i, labels[i]) <= eta
};

// Supervised cross-entropy where rows already predicted above the threshold
// are masked out for this step.
TsaLossResult supervised_tsa_loss(const Eigen::MatrixXd& probs, const std::vector<int>& labels,
                                  double eta);

// Row-wise temperature sharpening: q_k proportional to p_k^(1/temperature).
// temperature == 1 returns the input unchanged.
Eigen::MatrixXd sharpen_rows(const Eigen::MatrixXd& probs, double temperature);

// Mean KL(sharpen(p_orig) || p_aug) over rows whose max original probability
// reaches `confidence`; 0 when no row qualifies. DataError if p_aug is exactly
// zero where the sharpened target is positive.
double consistency_loss(const Eigen::MatrixXd& p_orig, const Eigen::MatrixXd& p_aug,
                        double temperature, double confidence);

// An unlabeled document paired with its augmented counterpart, both featurized.
struct UnlabeledPair {
    std::string id;
    Eigen::VectorXd original;
    Eigen::VectorXd augmented;
};

struct UdaConfig {
    TsaSchedule schedule = TsaSchedule::Log;
    long long total_steps = 1000;
    double lambda = 1.0;      // weight of the consistency term
    double temperature = 0.4; // sharpening temperature for the targets
    double confidence = 0.0;  // minimum max-probability for a pair to count
    int sup_batch = 32;
    int unsup_batch = 32;
    double learning_rate = 0.05;
    std::uint64_t seed = 1;
};

struct UdaLossGrad {
    double loss = 0.0;
    double sup_loss = 0.0;
    double unsup_loss = 0.0;
    Eigen::MatrixXd d_weights;
    Eigen::VectorXd d_bias;
};

// One training step's objective: TSA-masked cross-entropy on the labeled batch
// plus lambda * consistency on the unlabeled batch. Sharpened targets are
// treated as constants (no gradient flows through them). Passing lambda == 0
// or empty unlabeled matrices skips the consistency term entirely.
UdaLossGrad uda_loss_grad(const Eigen::MatrixXd& weights, const Eigen::VectorXd& bias,
                          const Eigen::MatrixXd& sup_rows, const std::vector<int>& sup_labels,
                          double eta, const Eigen::MatrixXd& unsup_orig,
                          const Eigen::MatrixXd& unsup_aug, double lambda, double temperature,
                          double confidence);

// Semi-supervised softmax classifier. With lambda == 0 and schedule None this
// reduces bit-for-bit to train_logreg(l2=0) run for the same number of steps,
// because both share the batch sampler, the gradient kernel and the optimizer.
LinearModel train_uda(const FeatureMatrix& labeled, const std::vector<UnlabeledPair>& unlabeled,
                      const UdaConfig& config);

} // namespace fewlabel
