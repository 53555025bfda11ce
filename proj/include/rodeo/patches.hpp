#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "rodeo/error.hpp"
#include "rodeo/image.hpp"

namespace rodeo {

/// Patches of one image, one flattened (row-major) patch per column.
struct PatchGrid {
    std::size_t patch_size = 32;
    std::size_t stride = 32;
    std::size_t rows = 0;  ///< patch rows
    std::size_t cols = 0;  ///< patch columns
    std::size_t pad_bottom = 0;
    std::size_t pad_right = 0;
    std::size_t height = 0;  ///< original image height
    std::size_t width = 0;   ///< original image width
    Eigen::MatrixXd patches;

    std::size_t count() const noexcept { return rows * cols; }
    bool overlapping() const noexcept { return stride != patch_size; }
};

namespace detail {

/// Padded extent covering `n` with windows of `size` placed every `stride`.
inline std::size_t padded_extent(std::size_t n, std::size_t size, std::size_t stride) {
    if (n <= size) return size;
    return size + ((n - size + stride - 1) / stride) * stride;
}

/// Mirror index without edge repetition: -1 -> 1, n -> n - 2.
inline std::size_t reflect(std::size_t i, std::size_t n) {
    return i < n ? i : 2 * (n - 1) - i;
}

} // namespace detail

/// Splits an image into patch_size x patch_size patches placed every
/// `stride` pixels (stride = patch_size or patch_size / 2). The bottom and
/// right edges are reflect-padded up to the next placement multiple.
inline PatchGrid extract_patches(const ImageGrid& image, std::size_t patch_size = 32,
                                 std::size_t stride = 0) {
    if (stride == 0) stride = patch_size;
    detail::require(patch_size >= 4, "patch_size must be at least 4");
    detail::require(stride == patch_size || (patch_size % 2 == 0 && stride == patch_size / 2),
                    "stride must equal patch_size or patch_size / 2");
    const std::size_t ph = detail::padded_extent(image.height(), patch_size, stride);
    const std::size_t pw = detail::padded_extent(image.width(), patch_size, stride);
    PatchGrid grid;
    grid.patch_size = patch_size;
    grid.stride = stride;
    grid.height = image.height();
    grid.width = image.width();
    grid.pad_bottom = ph - image.height();
    grid.pad_right = pw - image.width();
    detail::require(grid.pad_bottom < image.height() && grid.pad_right < image.width(),
                    "image " + std::to_string(image.height()) + "x" + std::to_string(image.width()) +
                        " is too small to reflect-pad to patch size " + std::to_string(patch_size));
    grid.rows = (ph - patch_size) / stride + 1;
    grid.cols = (pw - patch_size) / stride + 1;
    grid.patches.resize(static_cast<Eigen::Index>(patch_size * patch_size),
                        static_cast<Eigen::Index>(grid.count()));
    for (std::size_t pr = 0; pr < grid.rows; ++pr) {
        for (std::size_t pc = 0; pc < grid.cols; ++pc) {
            const auto col = static_cast<Eigen::Index>(pr * grid.cols + pc);
            for (std::size_t i = 0; i < patch_size; ++i) {
                const std::size_t r = detail::reflect(pr * stride + i, image.height());
                for (std::size_t j = 0; j < patch_size; ++j) {
                    const std::size_t c = detail::reflect(pc * stride + j, image.width());
                    grid.patches(static_cast<Eigen::Index>(i * patch_size + j), col) = image(r, c);
                }
            }
        }
    }
    return grid;
}

/// Places patches back and crops the padding. Overlapping grids average
/// every pixel over the patches covering it, in a fixed (row-major) order.
inline ImageGrid reassemble_patches(const PatchGrid& grid, std::size_t height, std::size_t width) {
    detail::require(height == grid.height && width == grid.width,
                    "requested dimensions do not match the patch grid");
    const std::size_t ps = grid.patch_size;
    detail::require(grid.patches.rows() == static_cast<Eigen::Index>(ps * ps) &&
                        grid.patches.cols() == static_cast<Eigen::Index>(grid.count()),
                    "patch matrix does not match the grid metadata");
    detail::require(grid.stride * (grid.rows - 1) + ps == height + grid.pad_bottom &&
                        grid.stride * (grid.cols - 1) + ps == width + grid.pad_right,
                    "patch grid padding is inconsistent with its placement");
    const std::size_t ph = height + grid.pad_bottom;
    const std::size_t pw = width + grid.pad_right;
    std::vector<double> sum(ph * pw, 0.0);
    std::vector<double> weight(ph * pw, 0.0);
    for (std::size_t pr = 0; pr < grid.rows; ++pr) {
        for (std::size_t pc = 0; pc < grid.cols; ++pc) {
            const auto col = static_cast<Eigen::Index>(pr * grid.cols + pc);
            for (std::size_t i = 0; i < ps; ++i) {
                for (std::size_t j = 0; j < ps; ++j) {
                    const std::size_t at = (pr * grid.stride + i) * pw + pc * grid.stride + j;
                    sum[at] += grid.patches(static_cast<Eigen::Index>(i * ps + j), col);
                    weight[at] += 1.0;
                }
            }
        }
    }
    ImageGrid out(height, width);
    for (std::size_t r = 0; r < height; ++r) {
        for (std::size_t c = 0; c < width; ++c) {
            out(r, c) = sum[r * pw + c] / weight[r * pw + c];
        }
    }
    return out;
}

/// Number of patches covering each pixel of the original image.
inline std::vector<int> coverage_counts(const PatchGrid& grid) {
    std::vector<int> counts(grid.height * grid.width, 0);
    for (std::size_t pr = 0; pr < grid.rows; ++pr)
        for (std::size_t pc = 0; pc < grid.cols; ++pc)
            for (std::size_t i = 0; i < grid.patch_size; ++i)
                for (std::size_t j = 0; j < grid.patch_size; ++j) {
                    const std::size_t r = pr * grid.stride + i;
                    const std::size_t c = pc * grid.stride + j;
                    if (r < grid.height && c < grid.width) ++counts[r * grid.width + c];
                }
    return counts;
}

} // namespace rodeo
