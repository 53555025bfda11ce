#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Core>

#include "rodeo/autoencoder.hpp"
#include "rodeo/error.hpp"
#include "rodeo/rng.hpp"
#include "rodeo/split_bregman.hpp"

namespace rodeo {

struct L2Gradient {
    double loss = 0.0;
    Eigen::MatrixXd enc;  ///< d loss / d W_enc
    Eigen::MatrixXd dec;  ///< d loss / d W_dec
};

/// Loss ||X_out - W' phi(W X_in)||_F^2 and its exact gradient by backprop.
inline L2Gradient l2_loss_and_gradient(const AutoencoderModel& model, const TrainingSet& set) {
    const Eigen::MatrixXd pre = model.w_enc * set.input;
    const Eigen::MatrixXd h = activate(pre, model.activation, ActivationDirection::forward);
    const Eigen::MatrixXd residual = set.target - model.w_dec * h;

    Eigen::MatrixXd slope;
    if (model.activation == Activation::tanh) {
        slope = (1.0 - h.array().square()).matrix();
    } else {
        slope = (h.array() * (1.0 - h.array())).matrix();
    }
    L2Gradient g;
    g.loss = residual.squaredNorm();
    g.dec = -2.0 * residual * h.transpose();
    const Eigen::MatrixXd d_pre = ((-2.0 * model.w_dec.transpose() * residual).array() * slope.array()).matrix();
    g.enc = d_pre * set.input.transpose();
    return g;
}

struct L2TrainingResult {
    AutoencoderModel model;
    std::vector<double> loss_history;  ///< loss before each epoch, then the final loss
};

/// Loss growth over the initial value treated as divergence.
inline constexpr double divergence_factor = 1e6;

/// Full-batch gradient descent baseline with the same initialization as
/// train_robust. The step is learning_rate * gradient / N, so the rate is
/// insensitive to the number of samples.
inline L2TrainingResult train_l2_baseline(const TrainingSet& set, const TrainConfig& config) {
    set.validate();
    detail::require(config.learning_rate >= 0.0, "learning_rate must be non-negative");
    detail::require(config.hidden >= 1, "hidden must be positive");
    SeededRng rng(config.seed);
    L2TrainingResult result{init_model(set.dim(), config.hidden, config.activation, rng), {}};
    const double step = config.learning_rate / static_cast<double>(set.samples());
    double initial = 0.0;
    for (std::size_t epoch = 0; epoch <= config.epochs; ++epoch) {
        const L2Gradient g = l2_loss_and_gradient(result.model, set);
        if (epoch == 0) initial = g.loss;
        if (!std::isfinite(g.loss) || g.loss > divergence_factor * initial) {
            throw NumericFailure("gradient descent diverged", epoch);
        }
        result.loss_history.push_back(g.loss);
        if (epoch == config.epochs) break;
        result.model.w_enc -= step * g.enc;
        result.model.w_dec -= step * g.dec;
    }
    return result;
}

} // namespace rodeo
