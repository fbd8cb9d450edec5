#include "fewlabel/linear.hpp"

#include <cmath>

#include "fewlabel/errors.hpp"
#include "fewlabel/optim.hpp"

namespace fewlabel {

void validate_features(const FeatureMatrix& data) {
    if (data.n() < 1) throw DataError("features: no rows");
    if (data.dim() < 1) throw DataError("features: zero-dimensional rows");
    if (static_cast<Eigen::Index>(data.labels.size()) != data.n()) {
        throw DataError("features: row/label count mismatch");
    }
    if (!data.rows.allFinite()) throw DataError("features: non-finite value");
    const int k = data.num_classes();
    for (int y : data.labels) {
        if (y < 0 || y >= k) throw DataError("features: label index out of range");
    }
}

FeatureMatrix subset_features(const FeatureMatrix& data, const std::vector<std::size_t>& indices) {
    FeatureMatrix out;
    out.classes = data.classes;
    out.rows.resize(static_cast<Eigen::Index>(indices.size()), data.dim());
    out.labels.reserve(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i) {
        out.rows.row(static_cast<Eigen::Index>(i)) = data.rows.row(static_cast<Eigen::Index>(indices[i]));
        out.labels.push_back(data.labels[indices[i]]);
    }
    return out;
}

Eigen::MatrixXd linear_scores(const Eigen::MatrixXd& weights, const Eigen::VectorXd& bias,
                              const Eigen::MatrixXd& rows) {
    if (rows.cols() != weights.cols()) throw DataError("linear model: feature dimension mismatch");
    Eigen::MatrixXd scores = rows * weights.transpose();
    scores.rowwise() += bias.transpose();
    return scores;
}

Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& scores) {
    Eigen::MatrixXd p = scores;
    const Eigen::VectorXd row_max = p.rowwise().maxCoeff();
    p.colwise() -= row_max;
    p = p.array().exp();
    const Eigen::VectorXd sums = p.rowwise().sum();
    p.array().colwise() /= sums.array();
    return p;
}

LossGrad masked_xent_grad(const Eigen::MatrixXd& probs, const Eigen::MatrixXd& rows,
                          const std::vector<int>& labels, const std::vector<bool>& kept,
                          std::size_t kept_count) {
    const Eigen::Index n = probs.rows();
    const double denom = static_cast<double>(std::max<std::size_t>(1, kept_count));

    Eigen::MatrixXd delta = probs;
    double loss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        delta(i, labels[static_cast<std::size_t>(i)]) -= 1.0;
        if (kept[static_cast<std::size_t>(i)]) {
            loss += -std::log(probs(i, labels[static_cast<std::size_t>(i)]));
        } else {
            delta.row(i).setZero();
        }
    }

    LossGrad out;
    out.loss = loss / denom;
    out.d_weights = delta.transpose() * rows / denom;
    out.d_bias = delta.colwise().sum().transpose() / denom;
    return out;
}

LossGrad logreg_loss_grad(const Eigen::MatrixXd& weights, const Eigen::VectorXd& bias,
                          const Eigen::MatrixXd& rows, const std::vector<int>& labels, double l2) {
    const Eigen::MatrixXd probs = softmax_rows(linear_scores(weights, bias, rows));
    const std::vector<bool> kept(static_cast<std::size_t>(rows.rows()), true);
    LossGrad out = masked_xent_grad(probs, rows, labels, kept, static_cast<std::size_t>(rows.rows()));
    // Skipped entirely at l2 == 0 so the unregularized path adds no terms.
    if (l2 != 0.0) {
        out.loss += 0.5 * l2 * weights.squaredNorm();
        out.d_weights += l2 * weights;
    }
    return out;
}

LinearModel train_logreg(const FeatureMatrix& data, double l2, int epochs, double learning_rate,
                         int batch_size, std::uint64_t seed) {
    validate_features(data);
    if (data.num_classes() < 2) throw DataError("train_logreg: need at least 2 classes");
    if (l2 < 0.0) throw DataError("train_logreg: l2 must be >= 0");
    if (epochs < 0) throw DataError("train_logreg: epochs must be >= 0");
    if (batch_size < 1) throw DataError("train_logreg: batch size must be >= 1");
    if (!(learning_rate > 0.0)) throw DataError("train_logreg: learning rate must be > 0");

    const Eigen::Index k = data.num_classes();
    const Eigen::Index d = data.dim();
    const std::size_t n = static_cast<std::size_t>(data.n());

    LinearModel model;
    model.kind = LinearKind::LogReg;
    model.l2 = l2;
    model.classes = data.classes;
    model.weights = Eigen::MatrixXd::Zero(k, d);
    model.bias = Eigen::VectorXd::Zero(k);

    const long long batches_per_epoch =
        static_cast<long long>((n + static_cast<std::size_t>(batch_size) - 1) / batch_size);
    const long long steps = static_cast<long long>(epochs) * batches_per_epoch;

    BatchSampler sampler(n, static_cast<std::size_t>(batch_size), seed);
    AdamState adam(learning_rate, k, d);
    Eigen::MatrixXd batch_rows(batch_size, d);
    std::vector<int> batch_labels(static_cast<std::size_t>(batch_size));
    for (long long step = 0; step < steps; ++step) {
        const auto& idx = sampler.next();
        for (std::size_t i = 0; i < idx.size(); ++i) {
            batch_rows.row(static_cast<Eigen::Index>(i)) = data.rows.row(static_cast<Eigen::Index>(idx[i]));
            batch_labels[i] = data.labels[idx[i]];
        }
        const LossGrad lg = logreg_loss_grad(model.weights, model.bias, batch_rows, batch_labels, l2);
        if (!std::isfinite(lg.loss)) {
            throw NumericError("train_logreg: non-finite loss at step " + std::to_string(step) +
                               "; lower the learning rate");
        }
        adam.step(model.weights, model.bias, lg.d_weights, lg.d_bias);
    }
    return model;
}

LossGrad svm_loss_grad(const Eigen::MatrixXd& weights, const Eigen::VectorXd& bias,
                       const Eigen::MatrixXd& rows, const std::vector<int>& labels, double c) {
    if (!(c > 0.0)) throw DataError("svm: C must be > 0");
    const Eigen::Index k = weights.rows();
    const Eigen::Index n = rows.rows();
    const double inv_n = 1.0 / static_cast<double>(n);

    LossGrad out;
    out.loss = 0.0;
    out.d_weights = Eigen::MatrixXd::Zero(k, weights.cols());
    out.d_bias = Eigen::VectorXd::Zero(k);

    const Eigen::MatrixXd scores = linear_scores(weights, bias, rows);
    Eigen::VectorXd coeff(n);
    for (Eigen::Index cls = 0; cls < k; ++cls) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const double y = (labels[static_cast<std::size_t>(i)] == cls) ? 1.0 : -1.0;
            const double margin = 1.0 - y * scores(i, cls);
            if (margin > 0.0) {
                out.loss += margin * inv_n;
                coeff(i) = -y * inv_n;
            } else {
                coeff(i) = 0.0;
            }
        }
        out.d_weights.row(cls) = coeff.transpose() * rows + weights.row(cls) / c;
        out.d_bias(cls) = coeff.sum();
        out.loss += weights.row(cls).squaredNorm() / (2.0 * c);
    }
    return out;
}

LinearModel train_svm(const FeatureMatrix& data, double c, int epochs, double learning_rate,
                      std::uint64_t seed) {
    (void)seed; // full-batch training is already deterministic
    validate_features(data);
    if (data.num_classes() < 2) throw DataError("train_svm: need at least 2 classes");
    if (!(c > 0.0)) throw DataError("train_svm: C must be > 0");
    if (epochs < 0) throw DataError("train_svm: epochs must be >= 0");
    if (!(learning_rate > 0.0)) throw DataError("train_svm: learning rate must be > 0");

    const Eigen::Index k = data.num_classes();
    LinearModel model;
    model.kind = LinearKind::Svm;
    model.classes = data.classes;
    model.weights = Eigen::MatrixXd::Zero(k, data.dim());
    model.bias = Eigen::VectorXd::Zero(k);

    AdamState adam(learning_rate, k, data.dim());
    for (int epoch = 0; epoch < epochs; ++epoch) {
        const LossGrad lg = svm_loss_grad(model.weights, model.bias, data.rows, data.labels, c);
        if (!std::isfinite(lg.loss)) {
            throw NumericError("train_svm: non-finite loss at epoch " + std::to_string(epoch));
        }
        adam.step(model.weights, model.bias, lg.d_weights, lg.d_bias);
    }
    return model;
}

Eigen::MatrixXd decision_scores(const LinearModel& model, const Eigen::MatrixXd& rows) {
    return linear_scores(model.weights, model.bias, rows);
}

Eigen::MatrixXd predict_proba(const LinearModel& model, const Eigen::MatrixXd& rows) {
    if (model.kind != LinearKind::LogReg) {
        throw DataError("predict_proba requires a logistic-regression model");
    }
    return softmax_rows(decision_scores(model, rows));
}

std::vector<int> argmax_rows(const Eigen::MatrixXd& scores) {
    std::vector<int> out(static_cast<std::size_t>(scores.rows()));
    for (Eigen::Index i = 0; i < scores.rows(); ++i) {
        int best = 0;
        for (Eigen::Index j = 1; j < scores.cols(); ++j) {
            if (scores(i, j) > scores(i, best)) best = static_cast<int>(j);
        }
        out[static_cast<std::size_t>(i)] = best;
    }
    return out;
}

std::vector<int> predict(const LinearModel& model, const Eigen::MatrixXd& rows) {
    return argmax_rows(decision_scores(model, rows));
}

} // namespace fewlabel
