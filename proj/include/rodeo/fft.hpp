#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "rodeo/error.hpp"
#include "rodeo/image.hpp"

namespace rodeo {

enum class FftDirection { forward, inverse };

inline bool is_power_of_two(std::size_t n) noexcept { return n > 0 && (n & (n - 1)) == 0; }

namespace detail {

/// In-place unscaled 1D transform of a strided sequence.
inline void fft_strided(Eigen::FFT<double>& engine, std::complex<double>* base, std::size_t n,
                        std::size_t stride, FftDirection direction,
                        std::vector<std::complex<double>>& in,
                        std::vector<std::complex<double>>& out) {
    in.resize(n);
    out.resize(n);
    for (std::size_t i = 0; i < n; ++i) in[i] = base[i * stride];
    if (direction == FftDirection::forward) {
        engine.fwd(out.data(), in.data(), static_cast<Eigen::Index>(n));
    } else {
        engine.inv(out.data(), in.data(), static_cast<Eigen::Index>(n));
    }
    for (std::size_t i = 0; i < n; ++i) base[i * stride] = out[i];
}

} // namespace detail

/// Unitary 2D DFT: both directions scale by 1/sqrt(height * width), so
/// inverse(forward(x)) == x and Parseval holds exactly in exact arithmetic.
inline ComplexGrid fft2(ComplexGrid grid, FftDirection direction) {
    const std::size_t h = grid.height();
    const std::size_t w = grid.width();
    detail::require(is_power_of_two(h) && is_power_of_two(w),
                    "fft2 requires power-of-two dimensions, got " + std::to_string(h) + "x" +
                        std::to_string(w));
    Eigen::FFT<double> engine;
    engine.SetFlag(Eigen::FFT<double>::Unscaled);
    std::vector<std::complex<double>> in, out;
    auto* data = grid.data().data();
    for (std::size_t r = 0; r < h; ++r) {
        detail::fft_strided(engine, data + r * w, w, 1, direction, in, out);
    }
    for (std::size_t c = 0; c < w; ++c) {
        detail::fft_strided(engine, data + c, h, w, direction, in, out);
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(h * w));
    for (auto& v : grid.data()) v *= scale;
    return grid;
}

inline ComplexGrid fft2(const ImageGrid& image, FftDirection direction) {
    return fft2(to_complex(image), direction);
}

} // namespace rodeo
