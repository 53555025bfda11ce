#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "rodeo/error.hpp"
#include "rodeo/image.hpp"
#include "rodeo/io.hpp"

namespace rodeo {

/// Parallel-beam sinogram: one row per angle, `detector_bins` columns.
struct ProjectionSet {
    std::vector<double> angles_deg;
    std::size_t detector_bins = 0;
    std::vector<double> sinogram;

    std::size_t angle_count() const noexcept { return angles_deg.size(); }
    double operator()(std::size_t angle, std::size_t bin) const {
        return sinogram[angle * detector_bins + bin];
    }
    double& operator()(std::size_t angle, std::size_t bin) {
        return sinogram[angle * detector_bins + bin];
    }
};

/// ceil(sqrt(2) * size), bumped to the next odd number.
inline std::size_t detector_bins_for(std::size_t size) {
    auto bins = static_cast<std::size_t>(std::ceil(std::numbers::sqrt2 * static_cast<double>(size)));
    return bins % 2 == 0 ? bins + 1 : bins;
}

/// Angles 0, spacing, 2*spacing, ... strictly below 180 degrees.
inline std::vector<double> uniform_angles(double spacing_deg) {
    detail::require(spacing_deg > 0.0 && spacing_deg < 180.0, "angular spacing must be in (0, 180)");
    std::vector<double> angles;
    for (std::size_t i = 0;; ++i) {
        const double a = static_cast<double>(i) * spacing_deg;
        if (a >= 180.0 - 1e-9) break;
        angles.push_back(a);
    }
    return angles;
}

namespace detail {

inline void check_angles(const std::vector<double>& angles) {
    require(!angles.empty(), "at least one projection angle is required");
    for (std::size_t i = 0; i < angles.size(); ++i) {
        require(angles[i] >= 0.0 && angles[i] < 180.0, "projection angles must lie in [0, 180)");
        require(i == 0 || angles[i] > angles[i - 1], "projection angles must be strictly increasing");
    }
}

/// Bilinear footprint of a point in pixel (row, col) coordinates.
struct Footprint {
    long row0, col0;
    double w00, w01, w10, w11;
};

inline Footprint bilinear(double row, double col) {
    const double fr = std::floor(row);
    const double fc = std::floor(col);
    const double ar = row - fr;
    const double ac = col - fc;
    return {static_cast<long>(fr), static_cast<long>(fc), (1 - ar) * (1 - ac), (1 - ar) * ac,
            ar * (1 - ac), ar * ac};
}

/// Visits the ray samples of every (angle, bin) pair, calling
/// visit(angle_index, bin, footprint). The samples are shared by the
/// forward projector and its exact adjoint.
template <typename Visitor>
void for_each_ray_sample(std::size_t size, const std::vector<double>& angles,
                         std::size_t bins, Visitor&& visit) {
    const double center = (static_cast<double>(size) - 1.0) / 2.0;
    const double det_center = (static_cast<double>(bins) - 1.0) / 2.0;
    const double limit = static_cast<double>(size) - 1.0;
    for (std::size_t a = 0; a < angles.size(); ++a) {
        const double theta = angles[a] * std::numbers::pi / 180.0;
        const double ct = std::cos(theta);
        const double st = std::sin(theta);
        for (std::size_t b = 0; b < bins; ++b) {
            const double t = static_cast<double>(b) - det_center;
            for (std::size_t j = 0; j < bins; ++j) {
                const double s = static_cast<double>(j) - det_center;
                const double x = t * ct - s * st;
                const double y = t * st + s * ct;
                const double col = center + x;
                const double row = center - y;
                if (row <= -1.0 || col <= -1.0 || row >= limit + 1.0 || col >= limit + 1.0) continue;
                visit(a, b, bilinear(row, col));
            }
        }
    }
}

inline bool inside(long r, long c, std::size_t size) {
    return r >= 0 && c >= 0 && r < static_cast<long>(size) && c < static_cast<long>(size);
}

} // namespace detail

/// Parallel-beam line integrals by rotate-and-sum with bilinear sampling,
/// unit pixel and detector spacing.
inline ProjectionSet radon_forward(const ImageGrid& image, const std::vector<double>& angles_deg) {
    detail::require(image.height() == image.width(), "radon transform requires a square image");
    detail::check_angles(angles_deg);
    const std::size_t n = image.height();
    ProjectionSet out{angles_deg, detector_bins_for(n), {}};
    out.sinogram.assign(angles_deg.size() * out.detector_bins, 0.0);
    auto pixel = [&](long r, long c) { return detail::inside(r, c, n) ? image(r, c) : 0.0; };
    detail::for_each_ray_sample(n, angles_deg, out.detector_bins,
                                [&](std::size_t a, std::size_t b, const detail::Footprint& f) {
                                    out(a, b) += f.w00 * pixel(f.row0, f.col0) +
                                                 f.w01 * pixel(f.row0, f.col0 + 1) +
                                                 f.w10 * pixel(f.row0 + 1, f.col0) +
                                                 f.w11 * pixel(f.row0 + 1, f.col0 + 1);
                                });
    return out;
}

/// Exact transpose of radon_forward (unfiltered, unscaled backprojection).
inline ImageGrid radon_adjoint(const ProjectionSet& projections, std::size_t size) {
    detail::check_angles(projections.angles_deg);
    detail::require(projections.detector_bins == detector_bins_for(size),
                    "detector bins do not match the image size");
    ImageGrid image(size, size);
    auto scatter = [&](long r, long c, double v) {
        if (detail::inside(r, c, size)) image(r, c) += v;
    };
    detail::for_each_ray_sample(size, projections.angles_deg, projections.detector_bins,
                                [&](std::size_t a, std::size_t b, const detail::Footprint& f) {
                                    const double v = projections(a, b);
                                    scatter(f.row0, f.col0, f.w00 * v);
                                    scatter(f.row0, f.col0 + 1, f.w01 * v);
                                    scatter(f.row0 + 1, f.col0, f.w10 * v);
                                    scatter(f.row0 + 1, f.col0 + 1, f.w11 * v);
                                });
    return image;
}

enum class FbpWindow { ram_lak, hann };

/// Ramp-filters every projection in the frequency domain.
inline std::vector<double> ramp_filter(const ProjectionSet& projections, FbpWindow window) {
    const std::size_t bins = projections.detector_bins;
    std::size_t padded = 1;
    while (padded < 2 * bins) padded <<= 1;

    // Band-limited ramp from its sampled spatial kernel: h[0] = 1/4,
    // h[n odd] = -1/(pi n)^2, h[n even] = 0.
    std::vector<std::complex<double>> kernel(padded, 0.0);
    for (std::size_t i = 0; i < padded; ++i) {
        const long n = i <= padded / 2 ? static_cast<long>(i) : static_cast<long>(i) - static_cast<long>(padded);
        if (n == 0) {
            kernel[i] = 0.25;
        } else if (n % 2 != 0) {
            kernel[i] = -1.0 / (std::numbers::pi * std::numbers::pi * double(n) * double(n));
        }
    }
    Eigen::FFT<double> engine;
    engine.SetFlag(Eigen::FFT<double>::Unscaled);
    std::vector<std::complex<double>> response(padded);
    engine.fwd(response.data(), kernel.data(), static_cast<Eigen::Index>(padded));
    for (std::size_t i = 0; i < padded; ++i) {
        double gain = response[i].real();
        if (window == FbpWindow::hann) {
            const double f = static_cast<double>(i <= padded / 2 ? i : padded - i) /
                             static_cast<double>(padded / 2);
            gain *= 0.5 * (1.0 + std::cos(std::numbers::pi * f));
        }
        response[i] = gain;
    }

    std::vector<double> filtered(projections.sinogram.size());
    std::vector<std::complex<double>> row(padded), spectrum(padded), back(padded);
    for (std::size_t a = 0; a < projections.angle_count(); ++a) {
        std::fill(row.begin(), row.end(), 0.0);
        for (std::size_t b = 0; b < bins; ++b) row[b] = projections(a, b);
        engine.fwd(spectrum.data(), row.data(), static_cast<Eigen::Index>(padded));
        for (std::size_t i = 0; i < padded; ++i) spectrum[i] *= response[i];
        engine.inv(back.data(), spectrum.data(), static_cast<Eigen::Index>(padded));
        for (std::size_t b = 0; b < bins; ++b) {
            filtered[a * bins + b] = back[b].real() / static_cast<double>(padded);
        }
    }
    return filtered;
}

/// Filtered back projection onto a size x size grid: ramp filter, then
/// pixel-driven backprojection with linear detector interpolation, scaled
/// by pi / number_of_angles.
inline ImageGrid fbp_reconstruct(const ProjectionSet& projections, std::size_t size,
                                 FbpWindow window = FbpWindow::ram_lak) {
    detail::check_angles(projections.angles_deg);
    detail::require(projections.detector_bins == detector_bins_for(size),
                    "detector bins " + std::to_string(projections.detector_bins) +
                        " do not match image size " + std::to_string(size));
    detail::require(projections.sinogram.size() ==
                        projections.angle_count() * projections.detector_bins,
                    "sinogram shape does not match angles x bins");
    const std::vector<double> filtered = ramp_filter(projections, window);
    const std::size_t bins = projections.detector_bins;
    const double center = (static_cast<double>(size) - 1.0) / 2.0;
    const double det_center = (static_cast<double>(bins) - 1.0) / 2.0;

    ImageGrid image(size, size);
    for (std::size_t a = 0; a < projections.angle_count(); ++a) {
        const double theta = projections.angles_deg[a] * std::numbers::pi / 180.0;
        const double ct = std::cos(theta);
        const double st = std::sin(theta);
        const double* q = filtered.data() + a * bins;
        for (std::size_t r = 0; r < size; ++r) {
            const double y = center - static_cast<double>(r);
            for (std::size_t c = 0; c < size; ++c) {
                const double x = static_cast<double>(c) - center;
                const double t = x * ct + y * st + det_center;
                const double ft = std::floor(t);
                const long i0 = static_cast<long>(ft);
                const double frac = t - ft;
                double v = 0.0;
                if (i0 >= 0 && i0 < static_cast<long>(bins)) v += (1.0 - frac) * q[i0];
                if (i0 + 1 >= 0 && i0 + 1 < static_cast<long>(bins)) v += frac * q[i0 + 1];
                image(r, c) += v;
            }
        }
    }
    const double scale = std::numbers::pi / static_cast<double>(projections.angle_count());
    for (auto& v : image.data()) v *= scale;
    return image;
}

/// Sidecar holding one angle (degrees) per line next to a sinogram tensor.
inline std::filesystem::path angles_sidecar(const std::filesystem::path& sinogram_path) {
    auto p = sinogram_path;
    p += ".angles";
    return p;
}

/// Sinogram as a rank-2 RDT1 tensor (angles x bins) plus the angle sidecar.
inline void write_projections(const std::filesystem::path& path, const ProjectionSet& projections) {
    detail::check_angles(projections.angles_deg);
    write_tensor(path, Tensor{{projections.angle_count(), projections.detector_bins}, projections.sinogram});
    std::string text;
    char buf[64];
    for (double a : projections.angles_deg) {
        std::snprintf(buf, sizeof buf, "%.17g\n", a);
        text += buf;
    }
    write_file_atomic(angles_sidecar(path), text);
}

inline ProjectionSet read_projections(const std::filesystem::path& path) {
    const Tensor t = read_tensor(path);
    if (t.shape.size() != 2) throw FormatError(path.string() + ": sinogram tensor must be rank 2");
    std::ifstream in(angles_sidecar(path));
    if (!in) throw FormatError("missing angle sidecar '" + angles_sidecar(path).string() + "'");
    ProjectionSet p;
    double a = 0.0;
    while (in >> a) p.angles_deg.push_back(a);
    if (!in.eof()) throw FormatError(angles_sidecar(path).string() + ": malformed angle list");
    if (p.angles_deg.size() != t.shape[0])
        throw FormatError(path.string() + ": sidecar lists " + std::to_string(p.angles_deg.size()) +
                          " angles, tensor has " + std::to_string(t.shape[0]));
    try {
        detail::check_angles(p.angles_deg);
    } catch (const InvalidArgument& e) {
        throw FormatError(angles_sidecar(path).string() + ": " + e.what());
    }
    p.detector_bins = t.shape[1];
    p.sinogram = t.values;
    return p;
}

} // namespace rodeo
