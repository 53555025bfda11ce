#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <string_view>

#include "rodeo/error.hpp"
#include "rodeo/image.hpp"
#include "rodeo/rng.hpp"

namespace rodeo {

enum class PhantomKind { shepp_logan, disks };

inline PhantomKind parse_phantom_kind(std::string_view name) {
    if (name == "shepp-logan") return PhantomKind::shepp_logan;
    if (name == "disks") return PhantomKind::disks;
    throw InvalidArgument("unknown phantom kind '" + std::string(name) + "'");
}

/// Ellipse in normalized coordinates: the image spans [-1, 1]^2, x to the
/// right, y upwards. Angle in degrees, counter-clockwise.
struct Ellipse {
    double intensity;
    double semi_x;
    double semi_y;
    double center_x;
    double center_y;
    double angle_deg;

    bool contains(double x, double y) const noexcept {
        const double theta = angle_deg * std::numbers::pi / 180.0;
        const double c = std::cos(theta);
        const double s = std::sin(theta);
        const double dx = x - center_x;
        const double dy = y - center_y;
        const double u = dx * c + dy * s;
        const double v = -dx * s + dy * c;
        return (u * u) / (semi_x * semi_x) + (v * v) / (semi_y * semi_y) <= 1.0;
    }
};

/// Original (non-modified) Shepp-Logan table: intensity, semi-axes, center, angle.
inline constexpr std::array<Ellipse, 10> shepp_logan_ellipses{{
    {2.00, 0.6900, 0.9200, 0.00, 0.0000, 0.0},
    {-0.98, 0.6624, 0.8740, 0.00, -0.0184, 0.0},
    {-0.02, 0.1100, 0.3100, 0.22, 0.0000, -18.0},
    {-0.02, 0.1600, 0.4100, -0.22, 0.0000, 18.0},
    {0.01, 0.2100, 0.2500, 0.00, 0.3500, 0.0},
    {0.01, 0.0460, 0.0460, 0.00, 0.1000, 0.0},
    {0.01, 0.0460, 0.0460, 0.00, -0.1000, 0.0},
    {0.01, 0.0460, 0.0230, -0.08, -0.6050, 0.0},
    {0.01, 0.0230, 0.0230, 0.00, -0.6060, 0.0},
    {0.01, 0.0230, 0.0460, 0.06, -0.6050, 0.0},
}};

/// The skull ellipse peaks at 2.0; dividing by it maps the phantom to [0, 1].
inline constexpr double shepp_logan_peak = 2.0;

/// Normalized coordinate of a pixel center.
inline double pixel_x(std::size_t col, std::size_t size) {
    return (static_cast<double>(col) + 0.5) * 2.0 / static_cast<double>(size) - 1.0;
}
inline double pixel_y(std::size_t row, std::size_t size) {
    return 1.0 - (static_cast<double>(row) + 0.5) * 2.0 / static_cast<double>(size);
}

template <typename Range>
ImageGrid rasterize_ellipses(const Range& ellipses, std::size_t size, double scale) {
    ImageGrid image(size, size);
    for (std::size_t r = 0; r < size; ++r) {
        const double y = pixel_y(r, size);
        for (std::size_t c = 0; c < size; ++c) {
            const double x = pixel_x(c, size);
            double value = 0.0;
            for (const Ellipse& e : ellipses) {
                if (e.contains(x, y)) value += e.intensity;
            }
            image(r, c) = std::clamp(value * scale, 0.0, 1.0);
        }
    }
    return image;
}

/// Deterministic test phantom of size x size pixels, values in [0, 1].
inline ImageGrid generate_phantom(PhantomKind kind, std::size_t size) {
    detail::require(size >= 16, "phantom size must be at least 16");
    switch (kind) {
    case PhantomKind::shepp_logan:
        return rasterize_ellipses(shepp_logan_ellipses, size, 1.0 / shepp_logan_peak);
    case PhantomKind::disks: {
        // background disk with a ring of smaller inserts
        std::array<Ellipse, 8> disks{};
        disks[0] = {0.2, 0.85, 0.85, 0.0, 0.0, 0.0};
        disks[1] = {0.6, 0.12, 0.12, 0.0, 0.0, 0.0};
        for (int i = 0; i < 6; ++i) {
            const double phi = i * std::numbers::pi / 3.0;
            const double radius = 0.05 + 0.02 * i;
            disks[i + 2] = {0.1 * (i + 1), radius, radius, 0.55 * std::cos(phi),
                            0.55 * std::sin(phi), 0.0};
        }
        return rasterize_ellipses(disks, size, 1.0);
    }
    }
    throw InvalidArgument("unknown phantom kind");
}

/// Seeded random-ellipse phantom for synthetic training corpora: an outer
/// head-like ellipse with a thin bright rim and 4-10 random inserts.
inline ImageGrid generate_random_phantom(std::size_t size, SeededRng& rng) {
    detail::require(size >= 16, "phantom size must be at least 16");
    std::vector<Ellipse> ellipses;
    const double outer_x = 0.70 + 0.2 * rng.uniform();
    const double outer_y = 0.70 + 0.2 * rng.uniform();
    const double rim = 0.04 + 0.03 * rng.uniform();
    const double tissue = 0.2 + 0.3 * rng.uniform();
    ellipses.push_back({1.0, outer_x, outer_y, 0.0, 0.0, 0.0});
    ellipses.push_back({tissue - 1.0, outer_x - rim, outer_y - rim, 0.0, 0.0, 0.0});
    const std::size_t inserts = 4 + static_cast<std::size_t>(rng.uniform_index(7));
    for (std::size_t i = 0; i < inserts; ++i) {
        const double sx = 0.05 + 0.25 * rng.uniform();
        const double sy = 0.05 + 0.25 * rng.uniform();
        const double cx = (outer_x - rim - sx) * (2.0 * rng.uniform() - 1.0) * 0.8;
        const double cy = (outer_y - rim - sy) * (2.0 * rng.uniform() - 1.0) * 0.8;
        const double angle = 180.0 * rng.uniform();
        const double delta = 0.5 * (2.0 * rng.uniform() - 1.0);
        ellipses.push_back({delta, sx, sy, cx, cy, angle});
    }
    return rasterize_ellipses(ellipses, size, 1.0);
}

} // namespace rodeo
