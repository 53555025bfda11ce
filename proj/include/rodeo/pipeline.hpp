#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "rodeo/autoencoder.hpp"
#include "rodeo/degrade.hpp"
#include "rodeo/error.hpp"
#include "rodeo/image.hpp"
#include "rodeo/io.hpp"
#include "rodeo/patches.hpp"

namespace rodeo {

struct CorpusEntry {
    std::filesystem::path image;
    std::optional<std::filesystem::path> degraded;
};

/// Plain-text corpus listing: one `image [degraded]` entry per line, `#`
/// starts a comment. Relative paths resolve against the manifest's folder.
struct CorpusManifest {
    std::vector<CorpusEntry> entries;

    static CorpusManifest parse(const std::string& text, const std::filesystem::path& base = {}) {
        CorpusManifest manifest;
        std::istringstream in(text);
        std::string line;
        auto resolve = [&](const std::string& p) {
            std::filesystem::path path(p);
            return path.is_relative() && !base.empty() ? base / path : path;
        };
        while (std::getline(in, line)) {
            if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            std::istringstream fields(line);
            std::string image, degraded, extra;
            if (!(fields >> image)) continue;
            CorpusEntry entry{resolve(image), std::nullopt};
            if (fields >> degraded) entry.degraded = resolve(degraded);
            if (fields >> extra) throw FormatError("manifest line has more than two paths: '" + line + "'");
            manifest.entries.push_back(std::move(entry));
        }
        return manifest;
    }

    static CorpusManifest load(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw FormatError("cannot open manifest '" + path.string() + "'");
        std::stringstream buffer;
        buffer << in.rdbuf();
        return parse(buffer.str(), path.parent_path());
    }
};

inline ImageGrid load_corpus_image(const std::filesystem::path& path) {
    try {
        return load_image(path);
    } catch (const std::exception& e) {
        throw FormatError("cannot read corpus image '" + path.string() + "': " + e.what());
    }
}

/// Clean/degraded pairs for a list of images; patches stacked column-wise in
/// (image order x row-major patch order). `degraded` may be empty, in which
/// case every image is degraded with `spec`.
inline TrainingSet build_training_set(const std::vector<ImageGrid>& clean,
                                      const std::vector<ImageGrid>& degraded,
                                      std::size_t patch_size) {
    detail::require(!clean.empty(), "training corpus is empty");
    detail::require(clean.size() == degraded.size(), "clean/degraded lists differ in length");
    std::vector<PatchGrid> clean_patches, degraded_patches;
    Eigen::Index total = 0;
    for (std::size_t i = 0; i < clean.size(); ++i) {
        detail::require(clean[i].same_shape(degraded[i]), "clean and degraded image shapes differ");
        clean_patches.push_back(extract_patches(clean[i], patch_size));
        degraded_patches.push_back(extract_patches(degraded[i], patch_size));
        total += static_cast<Eigen::Index>(clean_patches.back().count());
    }
    const auto d = static_cast<Eigen::Index>(patch_size * patch_size);
    Eigen::MatrixXd inputs(d, total), targets(d, total);
    Eigen::Index at = 0;
    for (std::size_t i = 0; i < clean.size(); ++i) {
        const auto n = clean_patches[i].patches.cols();
        inputs.middleCols(at, n) = degraded_patches[i].patches;
        targets.middleCols(at, n) = clean_patches[i].patches;
        at += n;
    }
    return TrainingSet::from_pairs(inputs, targets);
}

inline std::vector<ImageGrid> degrade_all(const std::vector<ImageGrid>& images,
                                          const DegradationSpec& spec) {
    std::vector<ImageGrid> out;
    out.reserve(images.size());
    for (std::size_t i = 0; i < images.size(); ++i) out.push_back(degrade(images[i], spec, i));
    return out;
}

inline TrainingSet build_training_set(const std::vector<ImageGrid>& clean,
                                      const DegradationSpec& spec, std::size_t patch_size) {
    return build_training_set(clean, degrade_all(clean, spec), patch_size);
}

/// Loads every manifest entry (using cached degraded images when listed).
inline TrainingSet build_training_set(const CorpusManifest& manifest, const DegradationSpec& spec,
                                      std::size_t patch_size) {
    detail::require(!manifest.entries.empty(), "corpus manifest is empty");
    std::vector<ImageGrid> clean, degraded;
    for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
        const auto& entry = manifest.entries[i];
        clean.push_back(load_corpus_image(entry.image));
        degraded.push_back(entry.degraded ? load_corpus_image(*entry.degraded)
                                          : degrade(clean.back(), spec, i));
    }
    return build_training_set(clean, degraded, patch_size);
}

struct ReconstructionTiming {
    std::size_t patches = 0;
    double seconds = 0.0;            ///< extract + forward + reassemble
    double seconds_per_patch = 0.0;
};

inline std::size_t model_patch_size(const AutoencoderModel& model) {
    const auto d = static_cast<std::size_t>(model.input_dim());
    const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(d))));
    detail::require(side * side == d, "model input_dim " + std::to_string(d) + " is not a square patch");
    return side;
}

/// Patch-wise de-aliasing of a crude inversion, clamped to [0, 1].
inline ImageGrid reconstruct_image(const AutoencoderModel& model, const ImageGrid& degraded,
                                   bool overlap, ReconstructionTiming* timing = nullptr) {
    model.validate();
    const std::size_t ps = model_patch_size(model);
    const auto start = std::chrono::steady_clock::now();
    PatchGrid grid = extract_patches(degraded, ps, overlap ? ps / 2 : ps);
    grid.patches = forward(model, grid.patches);
    ImageGrid out = clamp(reassemble_patches(grid, degraded.height(), degraded.width()), 0.0, 1.0);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (timing) {
        timing->patches = grid.count();
        timing->seconds = seconds;
        timing->seconds_per_patch = seconds / static_cast<double>(grid.count());
    }
    return out;
}

} // namespace rodeo
