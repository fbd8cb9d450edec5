#include "fewlabel/optim.hpp"

#include <cmath>
#include <numeric>

#include "fewlabel/errors.hpp"

namespace fewlabel {

AdamState::AdamState(double learning_rate, Eigen::Index k, Eigen::Index d)
    : lr(learning_rate),
      m_w(Eigen::MatrixXd::Zero(k, d)),
      v_w(Eigen::MatrixXd::Zero(k, d)),
      m_b(Eigen::VectorXd::Zero(k)),
      v_b(Eigen::VectorXd::Zero(k)) {
    if (!(learning_rate > 0.0)) throw DataError("adam: learning rate must be > 0");
}

void AdamState::step(Eigen::MatrixXd& weights, Eigen::VectorXd& bias,
                     const Eigen::MatrixXd& grad_weights, const Eigen::VectorXd& grad_bias) {
    ++steps;
    const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(steps));
    const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(steps));

    m_w = kBeta1 * m_w + (1.0 - kBeta1) * grad_weights;
    v_w = kBeta2 * v_w + (1.0 - kBeta2) * grad_weights.cwiseProduct(grad_weights);
    weights.array() -= lr * (m_w.array() / c1) / ((v_w.array() / c2).sqrt() + kEps);

    m_b = kBeta1 * m_b + (1.0 - kBeta1) * grad_bias;
    v_b = kBeta2 * v_b + (1.0 - kBeta2) * grad_bias.cwiseProduct(grad_bias);
    bias.array() -= lr * (m_b.array() / c1) / ((v_b.array() / c2).sqrt() + kEps);
}

BatchSampler::BatchSampler(std::size_t n, std::size_t batch_size, std::uint64_t seed)
    : batch_size_(batch_size), rng_(seed) {
    if (n == 0) throw DataError("batch sampler: empty index range");
    if (batch_size == 0) throw DataError("batch sampler: batch size must be >= 1");
    perm_.resize(n);
    std::iota(perm_.begin(), perm_.end(), std::size_t{0});
    rng_.shuffle(perm_);
    batch_.reserve(batch_size);
}

const std::vector<std::size_t>& BatchSampler::next() {
    batch_.clear();
    while (batch_.size() < batch_size_) {
        if (cursor_ == perm_.size()) {
            rng_.shuffle(perm_);
            cursor_ = 0;
        }
        batch_.push_back(perm_[cursor_++]);
    }
    return batch_;
}

} // namespace fewlabel
