#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "rodeo/autoencoder.hpp"
#include "rodeo/error.hpp"
#include "rodeo/linear_operator.hpp"
#include "rodeo/rng.hpp"

namespace rodeo {

struct CsSolveReport {
    Eigen::VectorXd solution;
    std::size_t iterations = 0;
    double final_objective = 0.0;
    double residual_norm = 0.0;
    std::vector<double> objective_history;  ///< ISTA: objective after each iteration
    std::vector<Eigen::Index> support;      ///< OMP: atoms in selection order
    std::vector<double> residual_history;   ///< OMP: residual norm after each iteration
};

/// Largest eigenvalue of A^T A by power iteration from a seeded random
/// start. Returns the final Rayleigh quotient; 0 for the zero operator.
inline double max_eigenvalue(const LinearOperator& op, std::size_t iters, std::uint64_t seed = 0) {
    detail::require(iters >= 10, "power iteration needs at least 10 iterations");
    SeededRng rng(seed);
    Eigen::VectorXd v(op.in_dim);
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.normal();
    v.normalize();
    double rayleigh = 0.0;
    for (std::size_t k = 0; k < iters; ++k) {
        const Eigen::VectorXd w = op.adjoint(op.apply(v));
        rayleigh = v.dot(w);
        const double norm = w.norm();
        if (norm == 0.0) return 0.0;
        v = w / norm;
    }
    return rayleigh;
}

struct IstaOptions {
    double step_safety = 0.95;       ///< sigma = step_safety / lambda_max
    std::size_t power_iters = 50;
    std::uint64_t seed = 0;
    double lambda_max = 0.0;         ///< use this estimate when positive
};

/// ISTA for min_x ||y - A x||_2^2 + lambda ||x||_1: Landweber step
/// b = x + sigma A^T (y - A x), then soft thresholding at lambda sigma / 2.
inline CsSolveReport ista_solve(const LinearOperator& op, const Eigen::VectorXd& y, double lambda,
                                std::size_t max_iter, double tol, const IstaOptions& options = {}) {
    detail::require(lambda >= 0.0, "ISTA lambda must be non-negative");
    detail::require(y.size() == op.out_dim, "measurement length does not match the operator");
    const double lmax =
        options.lambda_max > 0.0 ? options.lambda_max : max_eigenvalue(op, options.power_iters, options.seed);
    CsSolveReport report;
    report.solution = Eigen::VectorXd::Zero(op.in_dim);
    if (lmax <= 0.0) {
        report.residual_norm = y.norm();
        report.final_objective = y.squaredNorm();
        return report;
    }
    const double sigma = options.step_safety / lmax;
    const double threshold = lambda * sigma / 2.0;
    Eigen::VectorXd& x = report.solution;
    Eigen::VectorXd residual = y;  // y - A x with x = 0
    for (std::size_t k = 1; k <= max_iter; ++k) {
        const Eigen::VectorXd b = x + sigma * op.adjoint(residual);
        Eigen::VectorXd next = soft_threshold(b, threshold);
        if (!next.allFinite()) throw NumericFailure("ISTA iterate is non-finite", k);
        const double change = (next - x).norm();
        const double scale = x.norm();
        x.swap(next);
        residual = y - op.apply(x);
        const double value = residual.squaredNorm() + lambda * x.lpNorm<1>();
        report.objective_history.push_back(value);
        report.iterations = k;
        if (change <= tol * scale) break;
    }
    report.residual_norm = residual.norm();
    report.final_objective = report.objective_history.empty()
                                 ? y.squaredNorm()
                                 : report.objective_history.back();
    return report;
}

/// Orthogonal matching pursuit with exactly k iterations. Ties in the
/// correlation argmax resolve to the lowest index; atoms already in the
/// support are not reselected. Least squares on the support uses a ridge
/// of 1e-10.
inline CsSolveReport omp_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& y, std::size_t k) {
    const auto m = static_cast<std::size_t>(a.rows());
    const auto n = static_cast<std::size_t>(a.cols());
    detail::require(static_cast<std::size_t>(y.size()) == m, "measurement length does not match A");
    detail::require(k >= 1 && k <= std::min(m, n), "OMP sparsity k must be in [1, min(m, n)]");
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        detail::require(a.col(j).squaredNorm() > 0.0, "OMP requires nonzero columns");
    }
    constexpr double ridge = 1e-10;
    CsSolveReport report;
    std::vector<bool> chosen(n, false);
    Eigen::VectorXd residual = y;
    Eigen::VectorXd coeffs;
    for (std::size_t it = 1; it <= k; ++it) {
        const Eigen::VectorXd corr = (a.transpose() * residual).cwiseAbs();
        Eigen::Index best = -1;
        for (Eigen::Index j = 0; j < corr.size(); ++j) {
            if (chosen[j]) continue;
            if (best < 0 || corr[j] > corr[best]) best = j;
        }
        chosen[best] = true;
        report.support.push_back(best);

        Eigen::MatrixXd sub(m, report.support.size());
        for (std::size_t i = 0; i < report.support.size(); ++i) sub.col(i) = a.col(report.support[i]);
        Eigen::MatrixXd gram = sub.transpose() * sub;
        gram.diagonal().array() += ridge;
        coeffs = gram.ldlt().solve(sub.transpose() * y);
        residual = y - sub * coeffs;
        if (!residual.allFinite()) throw NumericFailure("OMP residual is non-finite", it);
        report.residual_history.push_back(residual.norm());
        report.iterations = it;
    }
    report.solution = Eigen::VectorXd::Zero(n);
    for (std::size_t i = 0; i < report.support.size(); ++i) report.solution[report.support[i]] = coeffs[i];
    report.residual_norm = residual.norm();
    report.final_objective = residual.squaredNorm();
    return report;
}

struct CsImageOptions {
    double lambda = 1e-3;
    std::size_t max_iter = 200;
    double tol = 0.0;  ///< 0 runs exactly max_iter iterations unless x stops moving
    IstaOptions ista;
};

/// ISTA over sparsifying coefficients for masked k-space; returns |W^T alpha|.
inline ImageGrid cs_reconstruct_image(const ComplexGrid& kspace, const SamplingMask& mask,
                                      const SparsifyingTransform& transform,
                                      const CsImageOptions& options) {
    detail::require(kspace.height() == mask.height && kspace.width() == mask.width,
                    "k-space and mask dimensions differ");
    const LinearOperator op = masked_fourier_operator(mask, transform);
    const Eigen::VectorXd y = stack_complex(apply_mask(kspace, mask));
    IstaOptions ista = options.ista;
    // R F is a row selection of a unitary map, so lambda_max(A^T A) <= 1.
    if (ista.lambda_max <= 0.0) ista.lambda_max = 1.0;
    const CsSolveReport report = ista_solve(op, y, options.lambda, options.max_iter, options.tol, ista);
    ImageGrid image = sparsify(image_from_vector(report.solution, mask.height, mask.width), transform,
                               TransformDirection::inverse);
    for (auto& v : image.data()) v = std::abs(v);
    return image;
}

/// Same pipeline with the radon operator substituted for R F.
inline ImageGrid cs_reconstruct_ct(const ProjectionSet& projections, std::size_t size,
                                   const SparsifyingTransform& transform,
                                   const CsImageOptions& options) {
    detail::require(projections.detector_bins == detector_bins_for(size),
                    "detector bins do not match the image size");
    const LinearOperator op = radon_operator(projections.angles_deg, size, transform);
    const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(
        projections.sinogram.data(), static_cast<Eigen::Index>(projections.sinogram.size()));
    const CsSolveReport report =
        ista_solve(op, y, options.lambda, options.max_iter, options.tol, options.ista);
    ImageGrid image =
        sparsify(image_from_vector(report.solution, size, size), transform, TransformDirection::inverse);
    for (auto& v : image.data()) v = std::abs(v);
    return image;
}

} // namespace rodeo
