#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "rodeo/error.hpp"
#include "rodeo/image.hpp"

namespace rodeo {

/// ||estimate - reference||_2 / ||reference||_2 (root-normalized).
inline double nmse(const ImageGrid& estimate, const ImageGrid& reference) {
    detail::require(estimate.same_shape(reference), "nmse: image dimensions differ");
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < reference.size(); ++i) {
        const double d = estimate.data()[i] - reference.data()[i];
        num += d * d;
        den += reference.data()[i] * reference.data()[i];
    }
    detail::require(den > 0.0, "nmse: reference image is identically zero");
    return std::sqrt(num) / std::sqrt(den);
}

inline double mse(const ImageGrid& estimate, const ImageGrid& reference) {
    detail::require(estimate.same_shape(reference), "mse: image dimensions differ");
    double sum = 0.0;
    for (std::size_t i = 0; i < reference.size(); ++i) {
        const double d = estimate.data()[i] - reference.data()[i];
        sum += d * d;
    }
    return sum / static_cast<double>(reference.size());
}

/// 10 log10(peak^2 / MSE) in dB; identical images give +infinity.
inline double psnr(const ImageGrid& estimate, const ImageGrid& reference, double peak = 1.0) {
    const double m = mse(estimate, reference);
    if (m == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(peak * peak / m);
}

/// Parameters of the standard SSIM: 11x11 Gaussian window, sigma 1.5,
/// K1 = 0.01, K2 = 0.03, dynamic range L = 1.
struct SsimParams {
    static constexpr int window = 11;
    static constexpr double sigma = 1.5;
    static constexpr double k1 = 0.01;
    static constexpr double k2 = 0.03;
    static constexpr double dynamic_range = 1.0;

    static constexpr double c1() { return (k1 * dynamic_range) * (k1 * dynamic_range); }
    static constexpr double c2() { return (k2 * dynamic_range) * (k2 * dynamic_range); }
};

inline std::array<double, SsimParams::window * SsimParams::window> ssim_window() {
    constexpr int n = SsimParams::window;
    std::array<double, n * n> w{};
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double di = i - n / 2;
            const double dj = j - n / 2;
            w[i * n + j] = std::exp(-(di * di + dj * dj) / (2.0 * SsimParams::sigma * SsimParams::sigma));
            sum += w[i * n + j];
        }
    }
    for (auto& v : w) v /= sum;
    return w;
}

/// Mean SSIM over all valid (fully inside) window positions.
///
/// Window statistics are accumulated relative to the window's center
/// pixel, so constant regions produce exactly zero variance and the
/// luminance term is computed without cancellation. The mean over windows
/// is taken relative to the first window, so uniform maps average exactly.
inline double ssim(const ImageGrid& estimate, const ImageGrid& reference) {
    constexpr int n = SsimParams::window;
    detail::require(estimate.same_shape(reference), "ssim: image dimensions differ");
    detail::require(reference.height() >= n && reference.width() >= n,
                    "ssim: images must be at least 11x11");
    const auto w = ssim_window();
    const double c1 = SsimParams::c1();
    const double c2 = SsimParams::c2();
    const std::size_t rows = reference.height() - n + 1;
    const std::size_t cols = reference.width() - n + 1;

    double first = 0.0;
    double total = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            const double ax = estimate(r + n / 2, c + n / 2);
            const double ay = reference(r + n / 2, c + n / 2);
            double mx = 0.0, my = 0.0;
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) {
                    mx += w[i * n + j] * (estimate(r + i, c + j) - ax);
                    my += w[i * n + j] * (reference(r + i, c + j) - ay);
                }
            }
            double vx = 0.0, vy = 0.0, cxy = 0.0;
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) {
                    const double dx = estimate(r + i, c + j) - ax - mx;
                    const double dy = reference(r + i, c + j) - ay - my;
                    vx += w[i * n + j] * dx * dx;
                    vy += w[i * n + j] * dy * dy;
                    cxy += w[i * n + j] * dx * dy;
                }
            }
            const double mu_x = ax + mx;
            const double mu_y = ay + my;
            const double luminance = (2.0 * mu_x * mu_y + c1) / (mu_x * mu_x + mu_y * mu_y + c1);
            const double structure = (2.0 * cxy + c2) / (vx + vy + c2);
            const double value = luminance * structure;
            if (r == 0 && c == 0) first = value;
            total += value - first;
        }
    }
    return first + total / static_cast<double>(rows * cols);
}

/// One evaluated image.
struct MetricRow {
    std::string name;
    double nmse = 0.0;
    double psnr = 0.0;
    double ssim = 0.0;
    double seconds = 0.0;
};

struct MetricSummary {
    double mean = 0.0;
    double stddev = 0.0;
};

/// Population mean and standard deviation.
inline MetricSummary summarize(const std::vector<double>& values) {
    if (values.empty()) return {};
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) /
                        static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    return {mean, std::sqrt(var / static_cast<double>(values.size()))};
}

/// Per-image rows plus aggregate mean/std of every metric.
class MetricReport {
public:
    void add(MetricRow row) { rows_.push_back(std::move(row)); }

    const std::vector<MetricRow>& rows() const noexcept { return rows_; }

    MetricSummary aggregate(double MetricRow::*field) const {
        std::vector<double> values;
        values.reserve(rows_.size());
        for (const auto& row : rows_) values.push_back(row.*field);
        return summarize(values);
    }

    /// CSV with header, one row per image, then `mean` and `std` rows.
    /// Timing is optional so that reproducible reports stay byte-stable.
    std::string to_csv(bool include_seconds) const {
        std::string out = include_seconds ? "name,nmse,psnr,ssim,seconds\n" : "name,nmse,psnr,ssim\n";
        auto line = [&](const std::string& name, double a, double b, double c, double s) {
            out += name + "," + format_number(a) + "," + format_number(b) + "," + format_number(c);
            if (include_seconds) out += "," + format_number(s);
            out += "\n";
        };
        for (const auto& r : rows_) line(r.name, r.nmse, r.psnr, r.ssim, r.seconds);
        const auto n = aggregate(&MetricRow::nmse);
        const auto p = aggregate(&MetricRow::psnr);
        const auto s = aggregate(&MetricRow::ssim);
        const auto t = aggregate(&MetricRow::seconds);
        line("mean", n.mean, p.mean, s.mean, t.mean);
        line("std", n.stddev, p.stddev, s.stddev, t.stddev);
        return out;
    }

    static std::string format_number(double v) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.10g", v);
        return buf;
    }

private:
    std::vector<MetricRow> rows_;
};

inline MetricRow evaluate(std::string name, const ImageGrid& estimate, const ImageGrid& reference,
                          double seconds = 0.0) {
    return {std::move(name), nmse(estimate, reference), psnr(estimate, reference),
            ssim(estimate, reference), seconds};
}

} // namespace rodeo
