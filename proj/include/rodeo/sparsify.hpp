#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "rodeo/error.hpp"
#include "rodeo/image.hpp"

namespace rodeo {

enum class SparsifierKind { haar_wavelet, dct };

inline SparsifierKind parse_sparsifier(std::string_view name) {
    if (name == "haar" || name == "haar-wavelet") return SparsifierKind::haar_wavelet;
    if (name == "dct") return SparsifierKind::dct;
    throw InvalidArgument("unknown sparsifying transform '" + std::string(name) + "'");
}

/// Orthonormal analysis/synthesis pair.
struct SparsifyingTransform {
    SparsifierKind kind = SparsifierKind::haar_wavelet;
    std::size_t levels = 3;
};

enum class TransformDirection { forward, inverse };

namespace detail {

/// One orthonormal Haar step on `n` samples at the given stride:
/// averages go to the first half, details to the second.
inline void haar_1d(double* data, std::size_t n, std::size_t stride, TransformDirection dir,
                    std::vector<double>& scratch) {
    const double k = std::numbers::sqrt2 / 2.0;
    const std::size_t half = n / 2;
    scratch.resize(n);
    if (dir == TransformDirection::forward) {
        for (std::size_t i = 0; i < half; ++i) {
            const double a = data[(2 * i) * stride];
            const double b = data[(2 * i + 1) * stride];
            scratch[i] = k * (a + b);
            scratch[half + i] = k * (a - b);
        }
    } else {
        for (std::size_t i = 0; i < half; ++i) {
            const double s = data[i * stride];
            const double d = data[(half + i) * stride];
            scratch[2 * i] = k * (s + d);
            scratch[2 * i + 1] = k * (s - d);
        }
    }
    for (std::size_t i = 0; i < n; ++i) data[i * stride] = scratch[i];
}

inline ImageGrid haar_2d(ImageGrid grid, std::size_t levels, TransformDirection dir) {
    const std::size_t h = grid.height();
    const std::size_t w = grid.width();
    const std::size_t block = std::size_t{1} << levels;
    require(levels >= 1, "wavelet levels must be at least 1");
    require(h % block == 0 && w % block == 0,
            "image dimensions must be divisible by 2^levels = " + std::to_string(block));
    std::vector<double> scratch;
    double* data = grid.data().data();
    auto apply_level = [&](std::size_t lh, std::size_t lw) {
        for (std::size_t r = 0; r < lh; ++r) haar_1d(data + r * w, lw, 1, dir, scratch);
        for (std::size_t c = 0; c < lw; ++c) haar_1d(data + c, lh, w, dir, scratch);
    };
    if (dir == TransformDirection::forward) {
        for (std::size_t l = 0; l < levels; ++l) apply_level(h >> l, w >> l);
    } else {
        // rows and columns commute within a level, so order inside a level is free
        for (std::size_t l = levels; l-- > 0;) apply_level(h >> l, w >> l);
    }
    return grid;
}

/// Orthonormal DCT-II basis matrix (rows are basis vectors).
inline Eigen::MatrixXd dct_matrix(std::size_t n) {
    Eigen::MatrixXd m(n, n);
    const double nd = static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double scale = k == 0 ? std::sqrt(1.0 / nd) : std::sqrt(2.0 / nd);
        for (std::size_t i = 0; i < n; ++i) {
            m(k, i) = scale * std::cos(std::numbers::pi * (2.0 * i + 1.0) * k / (2.0 * nd));
        }
    }
    return m;
}

inline ImageGrid dct_2d(const ImageGrid& grid, TransformDirection dir) {
    const Eigen::MatrixXd dh = dct_matrix(grid.height());
    const Eigen::MatrixXd dw = dct_matrix(grid.width());
    ImageGrid out(grid.height(), grid.width());
    if (dir == TransformDirection::forward) {
        as_matrix(out) = dh * as_matrix(grid) * dw.transpose();
    } else {
        as_matrix(out) = dh.transpose() * as_matrix(grid) * dw;
    }
    return out;
}

} // namespace detail

/// Forward = analysis (image -> coefficients), inverse = synthesis.
inline ImageGrid sparsify(const ImageGrid& grid, const SparsifyingTransform& transform,
                          TransformDirection direction) {
    switch (transform.kind) {
    case SparsifierKind::haar_wavelet: return detail::haar_2d(grid, transform.levels, direction);
    case SparsifierKind::dct: return detail::dct_2d(grid, direction);
    }
    throw InvalidArgument("unknown sparsifying transform");
}

} // namespace rodeo
