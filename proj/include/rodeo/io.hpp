#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "rodeo/error.hpp"
#include "rodeo/image.hpp"

namespace rodeo {

/// Dense row-major tensor of doubles; persisted as float32 in RDT1 files.
struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<double> values;

    std::size_t element_count() const {
        std::size_t n = 1;
        for (auto d : shape) n *= d;
        return n;
    }
    bool operator==(const Tensor&) const = default;
};

inline Tensor to_tensor(const ImageGrid& image) {
    return {{image.height(), image.width()}, image.values()};
}

inline ImageGrid to_image(const Tensor& tensor) {
    if (tensor.shape.size() != 2) {
        throw FormatError("expected a rank-2 tensor for an image, got rank " +
                          std::to_string(tensor.shape.size()));
    }
    return ImageGrid(tensor.shape[0], tensor.shape[1], tensor.values);
}

namespace detail {

inline void put_u32_le(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

inline std::uint32_t get_u32_le(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

inline std::string read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open '" + path.string() + "'");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace detail

/// Write bytes to `path` via a sibling temp file and rename.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& bytes) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw FormatError("cannot write '" + tmp.string() + "'");
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw FormatError("short write to '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, path);
}

inline std::string encode_tensor(const Tensor& tensor) {
    detail::require(!tensor.shape.empty() && tensor.shape.size() <= 255,
                    "tensor rank must be in [1, 255]");
    detail::require(tensor.values.size() == tensor.element_count(),
                    "tensor value count does not match its shape");
    std::string out = "RDT1";
    out.push_back(static_cast<char>(tensor.shape.size()));
    for (auto d : tensor.shape) {
        detail::require(d <= std::numeric_limits<std::uint32_t>::max(),
                        "tensor dimension exceeds uint32");
        detail::put_u32_le(out, static_cast<std::uint32_t>(d));
    }
    out.reserve(out.size() + 4 * tensor.values.size());
    for (double v : tensor.values) {
        detail::require(std::isfinite(v), "tensor values must be finite");
        detail::put_u32_le(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
    }
    return out;
}

inline Tensor decode_tensor(const std::string& bytes) {
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    if (bytes.size() < 5 || std::memcmp(p, "RDT1", 4) != 0) {
        throw FormatError("bad RDT1 magic");
    }
    const std::size_t rank = p[4];
    std::size_t offset = 5;
    if (bytes.size() < offset + 4 * rank) throw FormatError("truncated RDT1 header");
    Tensor tensor;
    std::uint64_t count = 1;
    for (std::size_t i = 0; i < rank; ++i) {
        const std::uint32_t d = detail::get_u32_le(p + offset);
        offset += 4;
        if (d != 0 && count > std::numeric_limits<std::uint64_t>::max() / 4 / d) {
            throw FormatError("RDT1 dimensions overflow");
        }
        count *= d;
        tensor.shape.push_back(d);
    }
    const std::uint64_t payload = bytes.size() - offset;
    if (payload != count * 4) {
        throw FormatError("RDT1 payload is " + std::to_string(payload) + " bytes, expected " +
                          std::to_string(count * 4));
    }
    tensor.values.resize(count);
    for (std::size_t i = 0; i < count; ++i, offset += 4) {
        const float f = std::bit_cast<float>(detail::get_u32_le(p + offset));
        if (!std::isfinite(f)) throw FormatError("RDT1 payload contains a non-finite value");
        tensor.values[i] = f;
    }
    return tensor;
}

inline void write_tensor(const std::filesystem::path& path, const Tensor& tensor) {
    write_file_atomic(path, encode_tensor(tensor));
}

inline Tensor read_tensor(const std::filesystem::path& path) {
    try {
        return decode_tensor(detail::read_file_bytes(path));
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

inline void write_image(const std::filesystem::path& path, const ImageGrid& image) {
    write_tensor(path, to_tensor(image));
}

/// Binary PGM (P5), linearly mapping [lo, hi] to [0, 2^depth - 1] and
/// clamping outside it. An empty range maps everything to 0.
inline std::string encode_pgm_range(const ImageGrid& image, double lo, double hi, int bit_depth) {
    detail::require(image.size() > 0, "cannot export a zero-area image");
    detail::require(bit_depth == 8 || bit_depth == 16, "PGM bit depth must be 8 or 16");
    const unsigned maxval = bit_depth == 8 ? 255u : 65535u;
    const double range = hi - lo;

    std::string out = "P5\n" + std::to_string(image.width()) + " " +
                      std::to_string(image.height()) + "\n" + std::to_string(maxval) + "\n";
    for (double v : image.values()) {
        const double scaled = range > 0.0 ? (v - lo) / range * maxval : 0.0;
        const auto q = static_cast<unsigned>(std::lround(std::clamp(scaled, 0.0, double(maxval))));
        if (bit_depth == 16) out.push_back(static_cast<char>(q >> 8));
        out.push_back(static_cast<char>(q & 0xFFu));
    }
    return out;
}

/// PGM mapping [min, max] of the image. A constant image maps to all zeros.
inline std::string encode_pgm(const ImageGrid& image, int bit_depth) {
    detail::require(image.size() > 0, "cannot export a zero-area image");
    const auto [lo, hi] = std::minmax_element(image.values().begin(), image.values().end());
    return encode_pgm_range(image, *lo, *hi, bit_depth);
}

inline void write_pgm(const std::filesystem::path& path, const ImageGrid& image, int bit_depth = 8) {
    write_file_atomic(path, encode_pgm(image, bit_depth));
}

/// Reads a binary PGM and normalizes samples by maxval into [0, 1].
inline ImageGrid read_pgm(const std::filesystem::path& path) {
    const std::string bytes = detail::read_file_bytes(path);
    std::size_t pos = 0;
    auto next_token = [&]() {
        for (;;) {
            while (pos < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
            if (pos < bytes.size() && bytes[pos] == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
                continue;
            }
            break;
        }
        const std::size_t start = pos;
        while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
        return bytes.substr(start, pos - start);
    };
    if (next_token() != "P5") throw FormatError(path.string() + ": not a binary PGM (P5)");
    std::size_t width = 0, height = 0;
    unsigned long maxval = 0;
    try {
        width = std::stoul(next_token());
        height = std::stoul(next_token());
        maxval = std::stoul(next_token());
    } catch (const std::exception&) {
        throw FormatError(path.string() + ": malformed PGM header");
    }
    if (width == 0 || height == 0 || maxval == 0 || maxval > 65535) {
        throw FormatError(path.string() + ": invalid PGM header values");
    }
    ++pos;  // single whitespace after maxval
    const std::size_t bytes_per = maxval > 255 ? 2 : 1;
    if (bytes.size() < pos + width * height * bytes_per) {
        throw FormatError(path.string() + ": truncated PGM payload");
    }
    std::vector<double> data(width * height);
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + pos);
    for (std::size_t i = 0; i < data.size(); ++i) {
        const unsigned v = bytes_per == 2 ? (p[2 * i] << 8) | p[2 * i + 1] : p[i];
        data[i] = static_cast<double>(v) / static_cast<double>(maxval);
    }
    return ImageGrid(height, width, std::move(data));
}

/// Saves as PGM (min-max mapped, 8 bit) when the extension is .pgm, else RDT1.
inline void save_image(const std::filesystem::path& path, const ImageGrid& image) {
    if (path.extension() == ".pgm") {
        write_pgm(path, image);
    } else {
        write_image(path, image);
    }
}

/// Loads an image from RDT1 (rank 2) or PGM, chosen by extension.
inline ImageGrid load_image(const std::filesystem::path& path) {
    const auto ext = path.extension().string();
    if (ext == ".pgm") return read_pgm(path);
    return to_image(read_tensor(path));
}

} // namespace rodeo
