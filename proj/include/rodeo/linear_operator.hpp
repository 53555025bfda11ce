#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "rodeo/error.hpp"
#include "rodeo/fft.hpp"
#include "rodeo/image.hpp"
#include "rodeo/mask.hpp"
#include "rodeo/radon.hpp"
#include "rodeo/sparsify.hpp"

namespace rodeo {

enum class OperatorRealization { explicit_matrix, masked_fourier_with_sparsifier, radon_with_sparsifier };

/// Real linear map with its adjoint, both as callables on dense vectors.
struct LinearOperator {
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> apply;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> adjoint;
    Eigen::Index in_dim = 0;
    Eigen::Index out_dim = 0;
    OperatorRealization realization = OperatorRealization::explicit_matrix;
};

inline LinearOperator explicit_operator(Eigen::MatrixXd matrix) {
    const Eigen::Index rows = matrix.rows();
    const Eigen::Index cols = matrix.cols();
    auto shared = std::make_shared<const Eigen::MatrixXd>(std::move(matrix));
    return {[shared](const Eigen::VectorXd& x) -> Eigen::VectorXd { return *shared * x; },
            [shared](const Eigen::VectorXd& y) -> Eigen::VectorXd { return shared->transpose() * y; },
            cols, rows, OperatorRealization::explicit_matrix};
}

/// Complex k-space grid as a real vector: [re_0, im_0, re_1, im_1, ...].
inline Eigen::VectorXd stack_complex(const ComplexGrid& grid) {
    Eigen::VectorXd v(2 * grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        v[2 * i] = grid.data()[i].real();
        v[2 * i + 1] = grid.data()[i].imag();
    }
    return v;
}

inline ComplexGrid unstack_complex(const Eigen::VectorXd& v, std::size_t height, std::size_t width) {
    detail::require(static_cast<std::size_t>(v.size()) == 2 * height * width,
                    "stacked complex vector has the wrong length");
    ComplexGrid grid(height, width);
    for (std::size_t i = 0; i < grid.size(); ++i) grid.data()[i] = {v[2 * i], v[2 * i + 1]};
    return grid;
}

/// A = R F W^T acting on real transform coefficients; measurements are
/// stacked complex k-space with unselected entries held at zero.
inline LinearOperator masked_fourier_operator(const SamplingMask& mask,
                                              const SparsifyingTransform& transform) {
    const std::size_t h = mask.height;
    const std::size_t w = mask.width;
    detail::require(is_power_of_two(h) && is_power_of_two(w),
                    "masked Fourier operator requires power-of-two dimensions");
    auto m = std::make_shared<const SamplingMask>(mask);
    LinearOperator op;
    op.in_dim = static_cast<Eigen::Index>(h * w);
    op.out_dim = static_cast<Eigen::Index>(2 * h * w);
    op.realization = OperatorRealization::masked_fourier_with_sparsifier;
    op.apply = [m, transform, h, w](const Eigen::VectorXd& coeffs) -> Eigen::VectorXd {
        const ImageGrid image =
            sparsify(image_from_vector(coeffs, h, w), transform, TransformDirection::inverse);
        return stack_complex(acquire_kspace(image, *m));
    };
    op.adjoint = [m, transform, h, w](const Eigen::VectorXd& y) -> Eigen::VectorXd {
        const ComplexGrid k = apply_mask(unstack_complex(y, h, w), *m);
        const ImageGrid back = real_part(fft2(k, FftDirection::inverse));
        return as_vector(sparsify(back, transform, TransformDirection::forward));
    };
    return op;
}

/// A = Radon W^T; measurements are the flattened sinogram.
inline LinearOperator radon_operator(const std::vector<double>& angles_deg, std::size_t size,
                                     const SparsifyingTransform& transform) {
    const std::size_t bins = detector_bins_for(size);
    LinearOperator op;
    op.in_dim = static_cast<Eigen::Index>(size * size);
    op.out_dim = static_cast<Eigen::Index>(angles_deg.size() * bins);
    op.realization = OperatorRealization::radon_with_sparsifier;
    op.apply = [angles_deg, size, transform](const Eigen::VectorXd& coeffs) -> Eigen::VectorXd {
        const ImageGrid image =
            sparsify(image_from_vector(coeffs, size, size), transform, TransformDirection::inverse);
        const ProjectionSet p = radon_forward(image, angles_deg);
        return Eigen::Map<const Eigen::VectorXd>(p.sinogram.data(),
                                                 static_cast<Eigen::Index>(p.sinogram.size()));
    };
    op.adjoint = [angles_deg, size, bins, transform](const Eigen::VectorXd& y) -> Eigen::VectorXd {
        ProjectionSet p{angles_deg, bins, std::vector<double>(y.data(), y.data() + y.size())};
        return as_vector(sparsify(radon_adjoint(p, size), transform, TransformDirection::forward));
    };
    return op;
}

} // namespace rodeo
