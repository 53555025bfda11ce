#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "rodeo/error.hpp"
#include "rodeo/rng.hpp"

namespace rodeo {

enum class Activation { tanh, sigmoid };

inline Activation parse_activation(std::string_view name) {
    if (name == "tanh") return Activation::tanh;
    if (name == "sigmoid") return Activation::sigmoid;
    throw InvalidArgument("unknown activation '" + std::string(name) + "'");
}

inline std::string to_string(Activation a) { return a == Activation::tanh ? "tanh" : "sigmoid"; }

enum class ActivationDirection { forward, inverse };

/// Elementwise activation or its inverse. The inverse clamps its input to
/// the open range of the activation (shrunk by clamp_eps), so it is total.
template <typename Derived>
Eigen::MatrixXd activate(const Eigen::MatrixBase<Derived>& values, Activation kind,
                         ActivationDirection direction, double clamp_eps = 1e-6) {
    Eigen::MatrixXd out = values;
    if (direction == ActivationDirection::forward) {
        if (kind == Activation::tanh) {
            out = out.array().tanh().matrix();
        } else {
            out = (1.0 / (1.0 + (-out.array()).exp())).matrix();
        }
    } else if (kind == Activation::tanh) {
        out = out.array().max(-1.0 + clamp_eps).min(1.0 - clamp_eps).matrix();
        out = (0.5 * ((1.0 + out.array()) / (1.0 - out.array())).log()).matrix();
    } else {
        out = out.array().max(clamp_eps).min(1.0 - clamp_eps).matrix();
        out = (out.array() / (1.0 - out.array())).log().matrix();
    }
    return out;
}

inline double activate(double v, Activation kind, ActivationDirection direction,
                       double clamp_eps = 1e-6) {
    Eigen::MatrixXd m(1, 1);
    m(0, 0) = v;
    return activate(m, kind, direction, clamp_eps)(0, 0);
}

/// Single-hidden-layer autoencoder x -> W_dec * phi(W_enc * [x; 1]).
struct AutoencoderModel {
    Eigen::MatrixXd w_enc;  ///< hidden x (d + 1); last column is the bias
    Eigen::MatrixXd w_dec;  ///< d x hidden
    Activation activation = Activation::tanh;

    Eigen::Index input_dim() const noexcept { return w_dec.rows(); }
    Eigen::Index hidden() const noexcept { return w_enc.rows(); }

    void validate() const {
        detail::require(w_enc.rows() >= 1 && w_enc.cols() >= 2, "encoder weights are empty");
        detail::require(w_dec.cols() == w_enc.rows() && w_dec.rows() + 1 == w_enc.cols(),
                        "encoder/decoder weight shapes are inconsistent");
        detail::require(w_enc.allFinite() && w_dec.allFinite(), "model weights must be finite");
    }
};

/// Seeded Gaussian weights with standard deviation 1/sqrt(fan-in).
/// Draw order: encoder column-major, then decoder column-major.
inline AutoencoderModel init_model(Eigen::Index input_dim, Eigen::Index hidden,
                                   Activation activation, SeededRng& rng) {
    detail::require(input_dim >= 1 && hidden >= 1, "input_dim and hidden must be positive");
    AutoencoderModel m{Eigen::MatrixXd(hidden, input_dim + 1),
                       Eigen::MatrixXd(input_dim, hidden), activation};
    const double enc_scale = 1.0 / std::sqrt(static_cast<double>(input_dim + 1));
    const double dec_scale = 1.0 / std::sqrt(static_cast<double>(hidden));
    for (Eigen::Index j = 0; j < m.w_enc.cols(); ++j)
        for (Eigen::Index i = 0; i < m.w_enc.rows(); ++i) m.w_enc(i, j) = enc_scale * rng.normal();
    for (Eigen::Index j = 0; j < m.w_dec.cols(); ++j)
        for (Eigen::Index i = 0; i < m.w_dec.rows(); ++i) m.w_dec(i, j) = dec_scale * rng.normal();
    return m;
}

/// W_enc * [x; 1] for column-stacked inputs without the bias row.
template <typename Derived>
Eigen::MatrixXd encode_linear(const AutoencoderModel& model, const Eigen::MatrixBase<Derived>& x) {
    detail::require(x.rows() == model.input_dim(),
                    "input has " + std::to_string(x.rows()) + " rows, model expects " +
                        std::to_string(model.input_dim()));
    Eigen::MatrixXd a = model.w_enc.leftCols(model.input_dim()) * x;
    a.colwise() += model.w_enc.col(model.input_dim());
    return a;
}

/// Batched forward pass; x is d x N (a single column for one vector).
template <typename Derived>
Eigen::MatrixXd forward(const AutoencoderModel& model, const Eigen::MatrixBase<Derived>& x) {
    detail::require(x.allFinite(), "forward input must be finite");
    const Eigen::MatrixXd h =
        activate(encode_linear(model, x), model.activation, ActivationDirection::forward);
    return model.w_dec * h;
}

/// Paired training data, one sample per column. `input` carries the
/// appended bias row of ones.
struct TrainingSet {
    Eigen::MatrixXd input;   ///< (d + 1) x N
    Eigen::MatrixXd target;  ///< d x N

    Eigen::Index samples() const noexcept { return target.cols(); }
    Eigen::Index dim() const noexcept { return target.rows(); }

    /// Builds a set from aligned inputs/targets (both d x N) by appending
    /// the bias row.
    static TrainingSet from_pairs(const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets) {
        detail::require(inputs.rows() == targets.rows() && inputs.cols() == targets.cols(),
                        "input and target matrices must have equal shapes");
        detail::require(inputs.cols() >= 1, "training set needs at least one sample");
        TrainingSet set{Eigen::MatrixXd(inputs.rows() + 1, inputs.cols()), targets};
        set.input.topRows(inputs.rows()) = inputs;
        set.input.bottomRows(1).setOnes();
        return set;
    }

    void validate() const {
        detail::require(samples() >= 1, "training set is empty");
        detail::require(input.rows() == target.rows() + 1 && input.cols() == target.cols(),
                        "training input/target shapes are inconsistent");
        detail::require((input.bottomRows(1).array() == 1.0).all(), "bias row must be all ones");
    }

    auto input_without_bias() const { return input.topRows(target.rows()); }
};

enum class RidgeSide {
    right,  ///< minimize ||B - X A||_F^2
    left,   ///< minimize ||B - A X||_F^2
};

/// Ridge-regularized least squares through the normal equations
/// (Gram + ridge_eps I). Always returns a finite solution for ridge_eps > 0.
inline Eigen::MatrixXd solve_ridge_least_squares(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                                 double ridge_eps, RidgeSide side = RidgeSide::right) {
    detail::require(ridge_eps >= 0.0, "ridge_eps must be non-negative");
    if (side == RidgeSide::right) {
        detail::require(a.cols() == b.cols(), "ridge solve: A and B column counts differ");
        Eigen::MatrixXd gram = a * a.transpose();
        gram.diagonal().array() += ridge_eps;
        return gram.ldlt().solve(a * b.transpose()).transpose();
    }
    detail::require(a.rows() == b.rows(), "ridge solve: A and B row counts differ");
    Eigen::MatrixXd gram = a.transpose() * a;
    gram.diagonal().array() += ridge_eps;
    return gram.ldlt().solve(a.transpose() * b);
}

/// sign(v) * max(0, |v| - tau), elementwise.
template <typename Derived>
Eigen::MatrixXd soft_threshold(const Eigen::MatrixBase<Derived>& values, double tau) {
    detail::require(tau >= 0.0, "soft threshold must be non-negative");
    return (values.array().sign() * (values.array().abs() - tau).max(0.0)).matrix();
}

inline double soft_threshold(double v, double tau) {
    detail::require(tau >= 0.0, "soft threshold must be non-negative");
    const double mag = std::abs(v) - tau;
    return mag > 0.0 ? std::copysign(mag, v) : 0.0;
}

/// Entrywise l1 reconstruction error sum |target - forward(input)|.
inline double objective_l1(const AutoencoderModel& model, const TrainingSet& set) {
    return (set.target - forward(model, set.input_without_bias())).array().abs().sum();
}

} // namespace rodeo
