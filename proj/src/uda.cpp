#include "fewlabel/uda.hpp"

#include <cmath>
#include <limits>
#include <optional>

#include "fewlabel/errors.hpp"
#include "fewlabel/optim.hpp"
#include "fewlabel/rng.hpp"

namespace fewlabel {

namespace {

struct ConsistencyParts {
    double loss = 0.0;
    Eigen::MatrixXd targets;  // sharpened original predictions, held constant
    std::vector<bool> kept;   // row confidence >= threshold
    std::size_t kept_count = 0;
};

// KL(q || p) per kept row, averaged. With throw_on_zero the exact-zero case in
// p (where q > 0) is a contract violation; otherwise it propagates as +inf and
// is caught by the trainer's finite check.
ConsistencyParts consistency_parts(const Eigen::MatrixXd& p_orig, const Eigen::MatrixXd& p_aug,
                                   double temperature, double confidence, bool throw_on_zero) {
    if (p_orig.rows() != p_aug.rows() || p_orig.cols() != p_aug.cols()) {
        throw DataError("consistency loss: prediction shapes differ");
    }
    ConsistencyParts parts;
    parts.targets = sharpen_rows(p_orig, temperature);
    parts.kept.assign(static_cast<std::size_t>(p_orig.rows()), false);

    double total = 0.0;
    for (Eigen::Index i = 0; i < p_orig.rows(); ++i) {
        if (p_orig.row(i).maxCoeff() < confidence) continue;
        parts.kept[static_cast<std::size_t>(i)] = true;
        ++parts.kept_count;
        double kl = 0.0;
        for (Eigen::Index k = 0; k < p_orig.cols(); ++k) {
            const double q = parts.targets(i, k);
            if (q <= 0.0) continue;
            const double p = p_aug(i, k);
            if (p == 0.0 && throw_on_zero) {
                throw DataError("consistency loss: augmented probability is exactly zero");
            }
            kl += q * (std::log(q) - std::log(p));
        }
        // Rounding can push an exact-match row a hair below zero; clamp it.
        total += std::max(0.0, kl);
    }
    parts.loss = total / static_cast<double>(std::max<std::size_t>(1, parts.kept_count));
    return parts;
}

void validate_uda_config(const UdaConfig& c) {
    if (c.total_steps < 1) throw DataError("train_uda: total_steps must be >= 1");
    if (c.lambda < 0.0) throw DataError("train_uda: lambda must be >= 0");
    if (!(c.temperature > 0.0)) throw DataError("train_uda: temperature must be > 0");
    if (!(c.confidence >= 0.0 && c.confidence <= 1.0)) {
        throw DataError("train_uda: confidence must be in [0, 1]");
    }
    if (c.sup_batch < 1) throw DataError("train_uda: sup_batch must be >= 1");
    if (c.unsup_batch < 1) throw DataError("train_uda: unsup_batch must be >= 1");
    if (!(c.learning_rate > 0.0)) throw DataError("train_uda: learning rate must be > 0");
}

} // namespace

TsaSchedule parse_tsa(const std::string& name) {
    if (name == "none") return TsaSchedule::None;
    if (name == "linear") return TsaSchedule::Linear;
    if (name == "exp") return TsaSchedule::Exp;
    if (name == "log") return TsaSchedule::Log;
    throw DataError("unknown TSA schedule: " + name + " (expected none|linear|exp|log)");
}

std::string tsa_name(TsaSchedule schedule) {
    switch (schedule) {
        case TsaSchedule::None: return "none";
        case TsaSchedule::Linear: return "linear";
        case TsaSchedule::Exp: return "exp";
        case TsaSchedule::Log: return "log";
    }
    throw DataError("invalid TSA schedule value");
}

double tsa_threshold(TsaSchedule schedule, long long t, long long total_steps, int num_classes) {
    if (num_classes < 2) throw DataError("tsa_threshold: need at least 2 classes");
    if (total_steps < 1) throw DataError("tsa_threshold: total_steps must be >= 1");
    if (t < 0 || t > total_steps) throw DataError("tsa_threshold: step out of range");
    if (schedule == TsaSchedule::None) return 1.0;

    const double x = static_cast<double>(t) / static_cast<double>(total_steps);
    double alpha = x;
    if (schedule == TsaSchedule::Exp) alpha = std::min(std::exp(5.0 * (x - 1.0)), x);
    if (schedule == TsaSchedule::Log) alpha = std::max(1.0 - std::exp(-5.0 * x), x);
    // alpha + (1 - alpha)/K hits 1/K and 1 exactly at the ends.
    return alpha + (1.0 - alpha) / static_cast<double>(num_classes);
}

TsaLossResult supervised_tsa_loss(const Eigen::MatrixXd& probs, const std::vector<int>& labels,
                                  double eta) {
    if (static_cast<std::size_t>(probs.rows()) != labels.size()) {
        throw DataError("supervised_tsa_loss: row/label count mismatch");
    }
    TsaLossResult result;
    result.kept.assign(labels.size(), false);
    std::size_t kept_count = 0;
    double total = 0.0;
    for (Eigen::Index i = 0; i < probs.rows(); ++i) {
        const double p = probs(i, labels[static_cast<std::size_t>(i)]);
        if (p <= eta) {
            result.kept[static_cast<std::size_t>(i)] = true;
            ++kept_count;
            total += -std::log(p);
        }
    }
    result.loss = total / static_cast<double>(std::max<std::size_t>(1, kept_count));
    return result;
}

Eigen::MatrixXd sharpen_rows(const Eigen::MatrixXd& probs, double temperature) {
    if (!(temperature > 0.0)) throw DataError("sharpen: temperature must be > 0");
    if (temperature == 1.0) return probs;
    Eigen::MatrixXd out(probs.rows(), probs.cols());
    for (Eigen::Index i = 0; i < probs.rows(); ++i) {
        // Work in log space: p^(1/T) = exp(ln(p)/T), shifted for stability.
        double max_l = -std::numeric_limits<double>::infinity();
        for (Eigen::Index k = 0; k < probs.cols(); ++k) {
            const double p = probs(i, k);
            const double l = (p > 0.0) ? std::log(p) / temperature : -std::numeric_limits<double>::infinity();
            out(i, k) = l;
            if (l > max_l) max_l = l;
        }
        double sum = 0.0;
        for (Eigen::Index k = 0; k < probs.cols(); ++k) {
            out(i, k) = std::exp(out(i, k) - max_l);
            sum += out(i, k);
        }
        out.row(i) /= sum;
    }
    return out;
}

double consistency_loss(const Eigen::MatrixXd& p_orig, const Eigen::MatrixXd& p_aug,
                        double temperature, double confidence) {
    return consistency_parts(p_orig, p_aug, temperature, confidence, /*throw_on_zero=*/true).loss;
}

UdaLossGrad uda_loss_grad(const Eigen::MatrixXd& weights, const Eigen::VectorXd& bias,
                          const Eigen::MatrixXd& sup_rows, const std::vector<int>& sup_labels,
                          double eta, const Eigen::MatrixXd& unsup_orig,
                          const Eigen::MatrixXd& unsup_aug, double lambda, double temperature,
                          double confidence) {
    const Eigen::MatrixXd sup_probs = softmax_rows(linear_scores(weights, bias, sup_rows));
    const TsaLossResult tsa = supervised_tsa_loss(sup_probs, sup_labels, eta);
    std::size_t kept_count = 0;
    for (bool k : tsa.kept) kept_count += k ? 1 : 0;

    LossGrad sup = masked_xent_grad(sup_probs, sup_rows, sup_labels, tsa.kept, kept_count);

    UdaLossGrad out;
    out.sup_loss = sup.loss;
    out.loss = sup.loss;
    out.d_weights = std::move(sup.d_weights);
    out.d_bias = std::move(sup.d_bias);

    // Strictly additive: when the consistency term is off nothing touches the
    // supervised gradients, keeping the reduction to plain logreg bit-exact.
    if (lambda > 0.0 && unsup_orig.rows() > 0) {
        const Eigen::MatrixXd p_orig = softmax_rows(linear_scores(weights, bias, unsup_orig));
        const Eigen::MatrixXd p_aug = softmax_rows(linear_scores(weights, bias, unsup_aug));
        const ConsistencyParts parts =
            consistency_parts(p_orig, p_aug, temperature, confidence, /*throw_on_zero=*/false);

        Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(p_aug.rows(), p_aug.cols());
        for (Eigen::Index i = 0; i < p_aug.rows(); ++i) {
            if (parts.kept[static_cast<std::size_t>(i)]) {
                delta.row(i) = p_aug.row(i) - parts.targets.row(i);
            }
        }
        const double denom = static_cast<double>(std::max<std::size_t>(1, parts.kept_count));
        out.unsup_loss = parts.loss;
        out.loss += lambda * parts.loss;
        out.d_weights += (lambda / denom) * (delta.transpose() * unsup_aug);
        out.d_bias += (lambda / denom) * delta.colwise().sum().transpose();
    }
    return out;
}

LinearModel train_uda(const FeatureMatrix& labeled, const std::vector<UnlabeledPair>& unlabeled,
                      const UdaConfig& config) {
    validate_features(labeled);
    if (labeled.num_classes() < 2) throw DataError("train_uda: need at least 2 classes");
    validate_uda_config(config);

    const Eigen::Index k = labeled.num_classes();
    const Eigen::Index d = labeled.dim();
    for (const auto& pair : unlabeled) {
        if (pair.original.size() != d || pair.augmented.size() != d) {
            throw DataError("train_uda: unlabeled pair dimension mismatch for " + pair.id);
        }
        if (!pair.original.allFinite() || !pair.augmented.allFinite()) {
            throw DataError("train_uda: non-finite unlabeled features for " + pair.id);
        }
    }

    LinearModel model;
    model.kind = LinearKind::LogReg;
    model.classes = labeled.classes;
    model.weights = Eigen::MatrixXd::Zero(k, d);
    model.bias = Eigen::VectorXd::Zero(k);

    const auto n = static_cast<std::size_t>(labeled.n());
    const bool use_unsup = config.lambda > 0.0 && !unlabeled.empty();

    BatchSampler sup_sampler(n, static_cast<std::size_t>(config.sup_batch), config.seed);
    AdamState adam(config.learning_rate, k, d);

    Eigen::MatrixXd unsup_orig_all, unsup_aug_all;
    std::optional<BatchSampler> unsup_sampler;
    if (use_unsup) {
        const auto m = static_cast<Eigen::Index>(unlabeled.size());
        unsup_orig_all.resize(m, d);
        unsup_aug_all.resize(m, d);
        for (Eigen::Index i = 0; i < m; ++i) {
            unsup_orig_all.row(i) = unlabeled[static_cast<std::size_t>(i)].original.transpose();
            unsup_aug_all.row(i) = unlabeled[static_cast<std::size_t>(i)].augmented.transpose();
        }
        unsup_sampler.emplace(unlabeled.size(), static_cast<std::size_t>(config.unsup_batch),
                              derive_seed(config.seed, "unsup-stream"));
    }

    Eigen::MatrixXd sup_rows(config.sup_batch, d);
    std::vector<int> sup_labels(static_cast<std::size_t>(config.sup_batch));
    Eigen::MatrixXd batch_orig(0, d), batch_aug(0, d);
    if (use_unsup) {
        batch_orig.resize(config.unsup_batch, d);
        batch_aug.resize(config.unsup_batch, d);
    }

    for (long long t = 1; t <= config.total_steps; ++t) {
        const double eta = tsa_threshold(config.schedule, t, config.total_steps,
                                         static_cast<int>(k));
        const auto& sup_idx = sup_sampler.next();
        for (std::size_t i = 0; i < sup_idx.size(); ++i) {
            sup_rows.row(static_cast<Eigen::Index>(i)) =
                labeled.rows.row(static_cast<Eigen::Index>(sup_idx[i]));
            sup_labels[i] = labeled.labels[sup_idx[i]];
        }
        if (use_unsup) {
            const auto& unsup_idx = unsup_sampler->next();
            for (std::size_t i = 0; i < unsup_idx.size(); ++i) {
                batch_orig.row(static_cast<Eigen::Index>(i)) =
                    unsup_orig_all.row(static_cast<Eigen::Index>(unsup_idx[i]));
                batch_aug.row(static_cast<Eigen::Index>(i)) =
                    unsup_aug_all.row(static_cast<Eigen::Index>(unsup_idx[i]));
            }
        }

        const UdaLossGrad lg =
            uda_loss_grad(model.weights, model.bias, sup_rows, sup_labels, eta, batch_orig,
                          batch_aug, use_unsup ? config.lambda : 0.0, config.temperature,
                          config.confidence);
        if (!std::isfinite(lg.loss)) {
            throw NumericError("train_uda: non-finite loss at step " + std::to_string(t) +
                               "; lower the learning rate");
        }
        adam.step(model.weights, model.bias, lg.d_weights, lg.d_bias);
    }
    return model;
}

} // namespace fewlabel
