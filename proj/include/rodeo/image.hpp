#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "rodeo/error.hpp"

namespace rodeo {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Row-major 2D grid. Shape is fixed at construction.
template <typename T>
class Grid {
public:
    using value_type = T;

    Grid() = default;

    Grid(std::size_t height, std::size_t width, T fill = T{})
        : height_(height), width_(width), data_(height * width, fill) {
        detail::require(height > 0 && width > 0, "grid dimensions must be positive");
    }

    Grid(std::size_t height, std::size_t width, std::vector<T> data)
        : height_(height), width_(width), data_(std::move(data)) {
        detail::require(height > 0 && width > 0, "grid dimensions must be positive");
        detail::require(data_.size() == height * width,
                        "grid data length " + std::to_string(data_.size()) +
                            " does not match " + std::to_string(height) + "x" +
                            std::to_string(width));
        for (const auto& v : data_) {
            detail::require(finite(v), "grid values must be finite");
        }
    }

    std::size_t height() const noexcept { return height_; }
    std::size_t width() const noexcept { return width_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    T& operator()(std::size_t row, std::size_t col) noexcept { return data_[row * width_ + col]; }
    const T& operator()(std::size_t row, std::size_t col) const noexcept {
        return data_[row * width_ + col];
    }

    std::span<T> data() noexcept { return data_; }
    std::span<const T> data() const noexcept { return data_; }
    const std::vector<T>& values() const noexcept { return data_; }

    bool same_shape(const Grid& other) const noexcept {
        return height_ == other.height_ && width_ == other.width_;
    }

    bool operator==(const Grid&) const = default;

private:
    static bool finite(const double& v) { return std::isfinite(v); }
    static bool finite(const std::complex<double>& v) {
        return std::isfinite(v.real()) && std::isfinite(v.imag());
    }

    std::size_t height_ = 0;
    std::size_t width_ = 0;
    std::vector<T> data_;
};

/// Real image; carries clean, aliased and reconstructed images alike.
using ImageGrid = Grid<double>;

/// Complex grid; carries k-space data.
using ComplexGrid = Grid<std::complex<double>>;

inline Eigen::Map<const RowMatrix> as_matrix(const ImageGrid& image) {
    return {image.data().data(), static_cast<Eigen::Index>(image.height()),
            static_cast<Eigen::Index>(image.width())};
}

inline Eigen::Map<RowMatrix> as_matrix(ImageGrid& image) {
    return {image.data().data(), static_cast<Eigen::Index>(image.height()),
            static_cast<Eigen::Index>(image.width())};
}

inline Eigen::Map<const Eigen::VectorXd> as_vector(const ImageGrid& image) {
    return {image.data().data(), static_cast<Eigen::Index>(image.size())};
}

inline ImageGrid image_from_vector(const Eigen::Ref<const Eigen::VectorXd>& v,
                                   std::size_t height, std::size_t width) {
    detail::require(static_cast<std::size_t>(v.size()) == height * width,
                    "vector length does not match image shape");
    return ImageGrid(height, width, std::vector<double>(v.data(), v.data() + v.size()));
}

inline ComplexGrid to_complex(const ImageGrid& image) {
    ComplexGrid out(image.height(), image.width());
    for (std::size_t i = 0; i < image.size(); ++i) out.data()[i] = image.data()[i];
    return out;
}

inline ImageGrid magnitude(const ComplexGrid& grid) {
    ImageGrid out(grid.height(), grid.width());
    for (std::size_t i = 0; i < grid.size(); ++i) out.data()[i] = std::abs(grid.data()[i]);
    return out;
}

inline ImageGrid real_part(const ComplexGrid& grid) {
    ImageGrid out(grid.height(), grid.width());
    for (std::size_t i = 0; i < grid.size(); ++i) out.data()[i] = grid.data()[i].real();
    return out;
}

inline ImageGrid clamp(const ImageGrid& image, double lo, double hi) {
    ImageGrid out = image;
    for (auto& v : out.data()) v = std::min(hi, std::max(lo, v));
    return out;
}

} // namespace rodeo
