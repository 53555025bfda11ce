#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "rodeo/autoencoder.hpp"
#include "rodeo/error.hpp"
#include "rodeo/rng.hpp"

namespace rodeo {

/// How the relaxation variables are refreshed after a cycle.
enum class BregmanUpdate {
    paper_literal,  ///< B1 <- P - (X - W'Z) - B1,  B2 <- Z - phi(WX) - B2
    additive,       ///< B1 <- B1 + (X - W'Z) - P,  B2 <- B2 + phi(WX) - Z
};

/// Latent (Z) block variant.
enum class LatentUpdate {
    coupled,        ///< exact minimizer of the full objective over Z
    paper_literal,  ///< Z <- phi(WX) + B2, ignoring the decoder term
};

inline BregmanUpdate parse_bregman_update(std::string_view s) {
    if (s == "paper-literal") return BregmanUpdate::paper_literal;
    if (s == "additive") return BregmanUpdate::additive;
    throw InvalidArgument("unknown bregman_update '" + std::string(s) + "'");
}
inline std::string to_string(BregmanUpdate b) {
    return b == BregmanUpdate::paper_literal ? "paper-literal" : "additive";
}
inline LatentUpdate parse_latent_update(std::string_view s) {
    if (s == "coupled") return LatentUpdate::coupled;
    if (s == "paper-literal") return LatentUpdate::paper_literal;
    throw InvalidArgument("unknown p4 mode '" + std::string(s) + "'");
}
inline std::string to_string(LatentUpdate p) {
    return p == LatentUpdate::coupled ? "coupled" : "paper-literal";
}

struct TrainConfig {
    Eigen::Index hidden = 256;
    double lambda = 1.0;
    double mu = 1.0;
    std::size_t max_iter = 500;
    double rel_tol = 1e-4;
    double ridge_eps = 1e-6;
    Activation activation = Activation::tanh;
    double atanh_clamp_eps = 1e-6;
    BregmanUpdate bregman_update = BregmanUpdate::paper_literal;
    LatentUpdate p4 = LatentUpdate::coupled;
    std::uint64_t seed = 0;
    // gradient-descent baseline only
    double learning_rate = 0.5;
    std::size_t epochs = 200;

    void validate() const {
        detail::require(hidden >= 1, "hidden must be positive");
        detail::require(lambda > 0.0 && mu > 0.0, "lambda and mu must be positive");
        detail::require(max_iter >= 1, "max_iter must be at least 1");
        detail::require(rel_tol >= 0.0, "rel_tol must be non-negative");
        detail::require(ridge_eps > 0.0, "ridge_eps must be positive");
        detail::require(atanh_clamp_eps > 0.0 && atanh_clamp_eps < 0.5,
                        "atanh_clamp_eps must be in (0, 0.5)");
    }
};

/// Auxiliary and relaxation variables of the split objective
///   ||P||_1 + lambda ||P - (X - W'Z) - B1||^2 + mu ||Z - phi(WX) - B2||^2
struct SplitBregmanState {
    Eigen::MatrixXd p;            ///< d x N residual split
    Eigen::MatrixXd z;            ///< hidden x N latent split
    Eigen::MatrixXd b1;           ///< d x N
    Eigen::MatrixXd b2;           ///< hidden x N
    Eigen::MatrixXd activations;  ///< phi(W_enc X_in), refreshed by the encoder block
    double lambda = 1.0;
    double mu = 1.0;
    std::size_t iteration = 0;
    double initial_objective = 0.0;
    std::vector<double> objective_history;  ///< split objective after each cycle
    std::vector<double> l1_history;         ///< ||X - W' phi(WX)||_1 after each cycle

    /// Cached factorization of X_in X_in^T + ridge_eps I (fixed per set).
    std::shared_ptr<const Eigen::LDLT<Eigen::MatrixXd>> input_gram;
};

namespace split_bregman {

inline void check_shapes(const AutoencoderModel& model, const TrainingSet& set,
                         const SplitBregmanState& s) {
    const auto d = set.dim();
    const auto n = set.samples();
    const auto h = model.hidden();
    detail::require(model.input_dim() == d, "model input_dim does not match training set");
    detail::require(s.p.rows() == d && s.p.cols() == n && s.b1.rows() == d && s.b1.cols() == n,
                    "P/B1 shapes are inconsistent with the training set");
    detail::require(s.z.rows() == h && s.z.cols() == n && s.b2.rows() == h && s.b2.cols() == n,
                    "Z/B2 shapes are inconsistent with the model");
    detail::require(s.activations.rows() == h && s.activations.cols() == n,
                    "cached activations have the wrong shape");
}

inline Eigen::MatrixXd encoder_activations(const AutoencoderModel& model, const TrainingSet& set) {
    return activate(model.w_enc * set.input, model.activation, ActivationDirection::forward);
}

/// Value of the split objective for the current variables.
inline double objective(const AutoencoderModel& model, const TrainingSet& set,
                        const SplitBregmanState& s) {
    const double l1 = s.p.array().abs().sum();
    const double fit = (s.p - (set.target - model.w_dec * s.z) - s.b1).squaredNorm();
    const double latent = (s.z - s.activations - s.b2).squaredNorm();
    return l1 + s.lambda * fit + s.mu * latent;
}

/// Fresh state for a model: Z = phi(W X), P = X_out - W' Z, B = 0.
inline SplitBregmanState init_state(const AutoencoderModel& model, const TrainingSet& set,
                                    const TrainConfig& config) {
    set.validate();
    SplitBregmanState s;
    s.activations = encoder_activations(model, set);
    s.z = s.activations;
    s.p = set.target - model.w_dec * s.z;
    s.b1 = Eigen::MatrixXd::Zero(set.dim(), set.samples());
    s.b2 = Eigen::MatrixXd::Zero(model.hidden(), set.samples());
    s.lambda = config.lambda;
    s.mu = config.mu;
    s.initial_objective = objective(model, set, s);
    return s;
}

/// P1: soft thresholding of V = (X - W'Z) + B1 at 1/(2 lambda).
inline void update_residual(const AutoencoderModel& model, const TrainingSet& set,
                            SplitBregmanState& s) {
    s.p = soft_threshold(set.target - model.w_dec * s.z + s.b1, 1.0 / (2.0 * s.lambda));
}

/// P2: encoder from the linearized problem ||phi^-1(Z - B2) - W X||_F^2.
inline void update_encoder(AutoencoderModel& model, const TrainingSet& set, SplitBregmanState& s,
                           const TrainConfig& config) {
    if (!s.input_gram || s.input_gram->rows() != set.input.rows()) {
        Eigen::MatrixXd gram = set.input * set.input.transpose();
        gram.diagonal().array() += config.ridge_eps;
        s.input_gram = std::make_shared<const Eigen::LDLT<Eigen::MatrixXd>>(gram);
    }
    const Eigen::MatrixXd target =
        activate(s.z - s.b2, model.activation, ActivationDirection::inverse, config.atanh_clamp_eps);
    model.w_enc = s.input_gram->solve(set.input * target.transpose()).transpose();
    s.activations = encoder_activations(model, set);
}

/// P3: decoder from ||(X - P + B1) - W' Z||_F^2.
inline void update_decoder(AutoencoderModel& model, const TrainingSet& set, SplitBregmanState& s,
                           const TrainConfig& config) {
    model.w_dec = solve_ridge_least_squares(s.z, set.target - s.p + s.b1, config.ridge_eps,
                                            RidgeSide::right);
}

/// P4: latent variables.
inline void update_latent(const AutoencoderModel& model, const TrainingSet& set,
                          SplitBregmanState& s, const TrainConfig& config) {
    if (config.p4 == LatentUpdate::paper_literal) {
        s.z = s.activations + s.b2;
        return;
    }
    // (lambda W'^T W' + mu I) Z = lambda W'^T (X - P + B1) + mu (phi(WX) + B2)
    Eigen::MatrixXd lhs = s.lambda * model.w_dec.transpose() * model.w_dec;
    lhs.diagonal().array() += s.mu;
    const Eigen::MatrixXd rhs = s.lambda * model.w_dec.transpose() * (set.target - s.p + s.b1) +
                                s.mu * (s.activations + s.b2);
    s.z = lhs.llt().solve(rhs);
}

inline void update_relaxation(const AutoencoderModel& model, const TrainingSet& set,
                              SplitBregmanState& s, BregmanUpdate mode) {
    const Eigen::MatrixXd fit_residual = set.target - model.w_dec * s.z;
    if (mode == BregmanUpdate::paper_literal) {
        s.b1 = s.p - fit_residual - s.b1;
        s.b2 = s.z - s.activations - s.b2;
    } else {
        s.b1 += fit_residual - s.p;
        s.b2 += s.activations - s.z;
    }
}

/// One full cycle P1 -> P2 -> P3 -> P4 -> relaxation update. Records the
/// split objective (before the relaxation update) and the l1 error.
inline void step(AutoencoderModel& model, const TrainingSet& set, SplitBregmanState& s,
                 const TrainConfig& config) {
    check_shapes(model, set, s);
    const std::size_t it = s.iteration + 1;
    update_residual(model, set, s);
    update_encoder(model, set, s, config);
    update_decoder(model, set, s, config);
    update_latent(model, set, s, config);
    const double value = objective(model, set, s);
    const double l1 = (set.target - model.w_dec * s.activations).array().abs().sum();
    update_relaxation(model, set, s, config.bregman_update);
    if (!std::isfinite(value) || !std::isfinite(l1) || !model.w_enc.allFinite() ||
        !model.w_dec.allFinite() || !s.z.allFinite() || !s.b1.allFinite() || !s.b2.allFinite()) {
        throw NumericFailure("split Bregman produced a non-finite value", it);
    }
    s.iteration = it;
    s.objective_history.push_back(value);
    s.l1_history.push_back(l1);
}

} // namespace split_bregman

/// One split Bregman cycle; see split_bregman::step.
inline void split_bregman_step(AutoencoderModel& model, const TrainingSet& set,
                               SplitBregmanState& state, const TrainConfig& config) {
    split_bregman::step(model, set, state, config);
}

struct RobustTrainingResult {
    AutoencoderModel model;
    SplitBregmanState state;
};

/// Number of consecutive small relative changes required before stopping.
inline constexpr std::size_t stopping_window = 5;

/// Trains the l1-cost autoencoder X_out ~ W' phi(W X_in) by split Bregman.
/// Stops once the relative change of the split objective stays below
/// rel_tol for `stopping_window` consecutive cycles, or at max_iter.
inline RobustTrainingResult train_robust(const TrainingSet& set, const TrainConfig& config) {
    detail::require(set.samples() >= 1, "training set is empty");
    set.validate();
    config.validate();
    SeededRng rng(config.seed);
    RobustTrainingResult result{init_model(set.dim(), config.hidden, config.activation, rng), {}};
    result.state = split_bregman::init_state(result.model, set, config);

    std::size_t calm = 0;
    double previous = result.state.initial_objective;
    for (std::size_t k = 0; k < config.max_iter; ++k) {
        split_bregman::step(result.model, set, result.state, config);
        const double current = result.state.objective_history.back();
        const double denom = std::max(std::abs(previous), std::numeric_limits<double>::min());
        calm = std::abs(current - previous) / denom < config.rel_tol ? calm + 1 : 0;
        previous = current;
        if (calm >= stopping_window) break;
    }
    return result;
}

} // namespace rodeo
