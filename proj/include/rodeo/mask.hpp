#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "rodeo/error.hpp"
#include "rodeo/fft.hpp"
#include "rodeo/image.hpp"
#include "rodeo/io.hpp"
#include "rodeo/rng.hpp"

namespace rodeo {

enum class MaskKind { random, variable_density, radial, periodic };

inline MaskKind parse_mask_kind(std::string_view name) {
    if (name == "random") return MaskKind::random;
    if (name == "variable-density") return MaskKind::variable_density;
    if (name == "radial") return MaskKind::radial;
    if (name == "periodic") return MaskKind::periodic;
    throw InvalidArgument("unknown mask kind '" + std::string(name) + "'");
}

inline std::string to_string(MaskKind kind) {
    switch (kind) {
    case MaskKind::random: return "random";
    case MaskKind::variable_density: return "variable-density";
    case MaskKind::radial: return "radial";
    case MaskKind::periodic: return "periodic";
    }
    return "?";
}

/// Kind-specific parameters. `fraction` drives random and variable-density
/// masks, `decay` variable-density, `lines` radial, `stride` periodic.
struct MaskParams {
    double fraction = 0.5;
    double decay = 1.0;
    std::size_t lines = 24;
    std::size_t stride = 2;

    bool operator==(const MaskParams&) const = default;
};

/// Boolean k-space selection in unshifted FFT layout (DC at index (0, 0)).
struct SamplingMask {
    std::size_t height = 0;
    std::size_t width = 0;
    MaskKind kind = MaskKind::random;
    MaskParams params;
    std::vector<std::uint8_t> selected;

    bool at(std::size_t row, std::size_t col) const { return selected[row * width + col] != 0; }

    std::size_t selected_count() const {
        return static_cast<std::size_t>(std::count(selected.begin(), selected.end(), 1));
    }

    double fraction() const {
        return static_cast<double>(selected_count()) / static_cast<double>(selected.size());
    }

    bool operator==(const SamplingMask&) const = default;
};

namespace detail {

/// Signed frequency of FFT index i on an axis of length n.
inline long signed_frequency(std::size_t i, std::size_t n) {
    return i < (n + 1) / 2 ? static_cast<long>(i) : static_cast<long>(i) - static_cast<long>(n);
}

inline std::size_t wrap_index(long f, std::size_t n) {
    const long m = static_cast<long>(n);
    return static_cast<std::size_t>(((f % m) + m) % m);
}

} // namespace detail

inline SamplingMask make_mask(MaskKind kind, std::size_t height, std::size_t width,
                              const MaskParams& params, SeededRng& rng) {
    detail::require(height > 0 && width > 0, "mask dimensions must be positive");
    SamplingMask mask{height, width, kind, params, std::vector<std::uint8_t>(height * width, 0)};
    auto select = [&](std::size_t r, std::size_t c) { mask.selected[r * width + c] = 1; };

    switch (kind) {
    case MaskKind::random: {
        detail::require(params.fraction > 0.0 && params.fraction <= 1.0,
                        "random mask fraction must be in (0, 1]");
        for (auto& s : mask.selected) s = rng.bernoulli(params.fraction) ? 1 : 0;
        break;
    }
    case MaskKind::variable_density: {
        detail::require(params.fraction > 0.0 && params.fraction <= 1.0,
                        "variable-density fraction must be in (0, 1]");
        detail::require(params.decay >= 0.0, "variable-density decay must be non-negative");
        // probability = min(1, c * (1 + r)^-decay), c chosen so the mean hits `fraction`
        std::vector<double> weight(height * width);
        for (std::size_t r = 0; r < height; ++r) {
            const double fy = static_cast<double>(detail::signed_frequency(r, height));
            for (std::size_t c = 0; c < width; ++c) {
                const double fx = static_cast<double>(detail::signed_frequency(c, width));
                weight[r * width + c] = std::pow(1.0 + std::hypot(fx, fy), -params.decay);
            }
        }
        auto mean_probability = [&](double scale) {
            double sum = 0.0;
            for (double w : weight) sum += std::min(1.0, scale * w);
            return sum / static_cast<double>(weight.size());
        };
        double lo = 0.0;
        double hi = 1.0;
        while (mean_probability(hi) < params.fraction && hi < 1e12) hi *= 2.0;
        for (int it = 0; it < 100; ++it) {
            const double mid = 0.5 * (lo + hi);
            (mean_probability(mid) < params.fraction ? lo : hi) = mid;
        }
        for (std::size_t i = 0; i < weight.size(); ++i) {
            mask.selected[i] = rng.bernoulli(std::min(1.0, hi * weight[i])) ? 1 : 0;
        }
        break;
    }
    case MaskKind::radial: {
        detail::require(params.lines >= 1, "radial mask needs at least one line");
        const double reach = static_cast<double>(std::max(height, width));
        const long half_h = static_cast<long>(height / 2);
        const long half_w = static_cast<long>(width / 2);
        for (std::size_t l = 0; l < params.lines; ++l) {
            const double theta = std::numbers::pi * static_cast<double>(l) /
                                 static_cast<double>(params.lines);
            const double dx = std::cos(theta);
            const double dy = std::sin(theta);
            for (double t = -reach; t <= reach; t += 0.5) {
                const long fx = std::lround(t * dx);
                const long fy = std::lround(t * dy);
                if (fx < -half_w || fx >= static_cast<long>(width) - half_w) continue;
                if (fy < -half_h || fy >= static_cast<long>(height) - half_h) continue;
                select(detail::wrap_index(fy, height), detail::wrap_index(fx, width));
            }
        }
        break;
    }
    case MaskKind::periodic: {
        detail::require(params.stride >= 1, "periodic stride must be at least 1");
        for (std::size_t r = 0; r < height; r += params.stride) {
            for (std::size_t c = 0; c < width; ++c) select(r, c);
        }
        break;
    }
    }
    select(0, 0);
    return mask;
}

inline Tensor mask_to_tensor(const SamplingMask& mask) {
    Tensor t{{mask.height, mask.width}, {}};
    t.values.assign(mask.selected.begin(), mask.selected.end());
    return t;
}

/// Rebuilds a mask from a persisted {0,1} tensor; kind/params are not stored.
inline SamplingMask mask_from_tensor(const Tensor& tensor) {
    if (tensor.shape.size() != 2) throw FormatError("mask tensor must be rank 2");
    SamplingMask mask;
    mask.height = tensor.shape[0];
    mask.width = tensor.shape[1];
    mask.selected.resize(tensor.values.size());
    for (std::size_t i = 0; i < tensor.values.size(); ++i) {
        const double v = tensor.values[i];
        if (v != 0.0 && v != 1.0) throw FormatError("mask tensor values must be 0 or 1");
        mask.selected[i] = v == 1.0 ? 1 : 0;
    }
    return mask;
}

inline ComplexGrid apply_mask(ComplexGrid kspace, const SamplingMask& mask) {
    detail::require(kspace.height() == mask.height && kspace.width() == mask.width,
                    "k-space and mask dimensions differ");
    for (std::size_t i = 0; i < kspace.size(); ++i) {
        if (!mask.selected[i]) kspace.data()[i] = 0.0;
    }
    return kspace;
}

/// Zero-filled inversion: drop unsampled coefficients, inverse FFT, magnitude.
inline ImageGrid zero_fill_invert(const ComplexGrid& kspace, const SamplingMask& mask) {
    return magnitude(fft2(apply_mask(kspace, mask), FftDirection::inverse));
}

/// Forward acquisition y = R F x (unselected entries held at zero).
inline ComplexGrid acquire_kspace(const ImageGrid& image, const SamplingMask& mask) {
    return apply_mask(fft2(image, FftDirection::forward), mask);
}

} // namespace rodeo
