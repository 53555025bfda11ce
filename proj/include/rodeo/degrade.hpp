#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rodeo/error.hpp"
#include "rodeo/fft.hpp"
#include "rodeo/image.hpp"
#include "rodeo/mask.hpp"
#include "rodeo/radon.hpp"
#include "rodeo/rng.hpp"

namespace rodeo {

struct MriDegradation {
    MaskKind mask_kind = MaskKind::random;
    MaskParams mask_params;
};

struct CtDegradation {
    double spacing_deg = 5.0;
};

struct ImpulseDegradation {
    double fraction = 0.15;
};

/// One acquisition regime plus its seed. For MRI the seed fixes the
/// sampling mask shared by every image; for impulse corruption the
/// pipeline derives a per-image stream from it.
struct DegradationSpec {
    std::variant<MriDegradation, CtDegradation, ImpulseDegradation> modality;
    std::uint64_t seed = 0;

    void validate() const {
        if (const auto* imp = std::get_if<ImpulseDegradation>(&modality)) {
            detail::require(imp->fraction >= 0.0 && imp->fraction <= 1.0,
                            "impulse fraction must be in [0, 1]");
        }
        if (const auto* ct = std::get_if<CtDegradation>(&modality)) {
            detail::require(ct->spacing_deg > 0.0 && ct->spacing_deg < 180.0,
                            "CT angular spacing must be in (0, 180)");
        }
    }
};

inline SamplingMask degradation_mask(const DegradationSpec& spec, std::size_t height,
                                     std::size_t width) {
    const auto& mri = std::get<MriDegradation>(spec.modality);
    SeededRng rng(spec.seed);
    return make_mask(mri.mask_kind, height, width, mri.mask_params, rng);
}

/// Sets exactly round(fraction * H * W) distinct pixels to 0 or 1 (each
/// with probability 1/2).
inline ImageGrid impulse_corrupt(const ImageGrid& image, double fraction, SeededRng& rng) {
    detail::require(fraction >= 0.0 && fraction <= 1.0, "impulse fraction must be in [0, 1]");
    ImageGrid out = image;
    const std::size_t total = image.size();
    const auto count = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(total)));
    std::vector<std::size_t> order(total);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.uniform_index(total - i));
        std::swap(order[i], order[j]);
        out.data()[order[i]] = rng.bernoulli(0.5) ? 1.0 : 0.0;
    }
    return out;
}

/// Simulated acquisition followed by the crude inversion (or the
/// corruption itself for the impulse regime).
inline ImageGrid degrade(const ImageGrid& image, const DegradationSpec& spec,
                         std::uint64_t image_index = 0) {
    spec.validate();
    return std::visit(
        [&](const auto& m) -> ImageGrid {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, MriDegradation>) {
                const SamplingMask mask = degradation_mask(spec, image.height(), image.width());
                return zero_fill_invert(acquire_kspace(image, mask), mask);
            } else if constexpr (std::is_same_v<T, CtDegradation>) {
                detail::require(image.height() == image.width(), "CT degradation needs a square image");
                const ProjectionSet p = radon_forward(image, uniform_angles(m.spacing_deg));
                return fbp_reconstruct(p, image.height());
            } else {
                SeededRng rng(SeededRng::split(spec.seed, image_index));
                return impulse_corrupt(image, m.fraction, rng);
            }
        },
        spec.modality);
}

} // namespace rodeo
