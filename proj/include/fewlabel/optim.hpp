#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "fewlabel/rng.hpp"

namespace fewlabel {

// Adam for a (weights, bias) pair. Shared by every gradient trainer so that
// two trainers fed identical gradients produce bit-identical parameters.
struct AdamState {
    static constexpr double kBeta1 = 0.9;
    static constexpr double kBeta2 = 0.999;
    static constexpr double kEps = 1e-8;

    double lr;
    long long steps = 0;
    Eigen::MatrixXd m_w, v_w;
    Eigen::VectorXd m_b, v_b;

    AdamState(double learning_rate, Eigen::Index k, Eigen::Index d);

    void step(Eigen::MatrixXd& weights, Eigen::VectorXd& bias,
              const Eigen::MatrixXd& grad_weights, const Eigen::VectorXd& grad_bias);
};

// Cycles through a seeded permutation of [0, n), reshuffling whenever it runs
// out; every call returns exactly batch_size indices.
class BatchSampler {
public:
    BatchSampler(std::size_t n, std::size_t batch_size, std::uint64_t seed);

    const std::vector<std::size_t>& next();

private:
    std::vector<std::size_t> perm_;
    std::vector<std::size_t> batch_;
    std::size_t cursor_ = 0;
    std::size_t batch_size_;
    Rng rng_;
};

} // namespace fewlabel
