#pragma once

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "rodeo/config.hpp"
#include "rodeo/cs_solvers.hpp"
#include "rodeo/degrade.hpp"
#include "rodeo/error.hpp"
#include "rodeo/io.hpp"
#include "rodeo/l2_baseline.hpp"
#include "rodeo/metrics.hpp"
#include "rodeo/phantom.hpp"
#include "rodeo/pipeline.hpp"
#include "rodeo/split_bregman.hpp"

namespace rodeo {

/// Method names, in report order. `raw` is the crude inversion itself
/// (zero-filled, FBP or the corrupted image).
inline const std::vector<std::string>& bench_methods() {
    static const std::vector<std::string> methods = {"rodeo", "l2-baseline", "ista-cs", "raw"};
    return methods;
}

struct NamedImage {
    std::string name;
    ImageGrid clean;
    ImageGrid degraded;
};

/// Train and test images, already degraded.
struct BenchCorpus {
    std::vector<NamedImage> train;
    std::vector<NamedImage> test;
};

struct MethodTiming {
    std::string method;
    double train_seconds = 0.0;                ///< offline training, 0 for untrained methods
    std::vector<double> reconstruct_seconds;   ///< per test image, median over repetitions
    double median_seconds() const;
};

struct BenchResult {
    std::vector<std::pair<std::string, MetricReport>> reports;  ///< bench_methods() order
    std::vector<MethodTiming> timings;
    std::size_t rodeo_iterations = 0;
    std::size_t l2_epochs = 0;
    double ista_over_rodeo = 0.0;  ///< median ISTA time / median rodeo time, 0 when ISTA is skipped
    std::size_t patches_per_image = 0;  ///< first test image
    std::string header;                 ///< embedded config

    const MetricReport* report(const std::string& method) const {
        for (const auto& [name, r] : reports)
            if (name == method) return &r;
        return nullptr;
    }
    const MethodTiming* timing(const std::string& method) const {
        for (const auto& t : timings)
            if (t.method == method) return &t;
        return nullptr;
    }
};

namespace detail {

inline double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Runs `f` `reps` times; returns the median wall-clock seconds.
inline double median_seconds(std::size_t reps, const std::function<void()>& f) {
    std::vector<double> seconds;
    for (std::size_t i = 0; i < std::max<std::size_t>(reps, 1); ++i) {
        const auto start = std::chrono::steady_clock::now();
        f();
        seconds.push_back(
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    }
    return median(std::move(seconds));
}

inline std::string synthetic_name(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "synthetic_%04zu", index);
    return buf;
}

inline std::vector<NamedImage> load_split(const std::filesystem::path& manifest_path,
                                          const DegradationSpec& spec, std::size_t index_offset) {
    const CorpusManifest manifest = CorpusManifest::load(manifest_path);
    std::vector<NamedImage> out;
    for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
        const auto& entry = manifest.entries[i];
        NamedImage item{entry.image.filename().string(), load_corpus_image(entry.image), {}};
        item.degraded = entry.degraded ? load_corpus_image(*entry.degraded)
                                       : degrade(item.clean, spec, index_offset + i);
        out.push_back(std::move(item));
    }
    return out;
}

inline std::filesystem::path canonical_or_self(const std::filesystem::path& p) {
    std::error_code ec;
    auto c = std::filesystem::weakly_canonical(p, ec);
    return ec ? p : c;
}

} // namespace detail

inline double MethodTiming::median_seconds() const {
    return reconstruct_seconds.empty() ? 0.0 : detail::median(reconstruct_seconds);
}

/// Train and test split from two manifests, or from seeded synthetic
/// phantoms. With `need_test` false the test split may be absent.
inline BenchCorpus load_bench_corpus(const RunConfig& config, bool need_test = true) {
    const DegradationSpec spec = config.degradation();
    BenchCorpus corpus;
    const std::string& train_manifest = config.get("train_manifest");
    const std::string& test_manifest = config.get("test_manifest");
    if (!train_manifest.empty() || !test_manifest.empty()) {
        if (train_manifest.empty() || (need_test && test_manifest.empty()))
            throw ConfigError("train_manifest and test_manifest must be given together");
        corpus.train = detail::load_split(train_manifest, spec, 0);
        if (!test_manifest.empty()) {
            const auto train_list = CorpusManifest::load(train_manifest);
            const auto test_list = CorpusManifest::load(test_manifest);
            std::set<std::filesystem::path> seen;
            for (const auto& e : train_list.entries) seen.insert(detail::canonical_or_self(e.image));
            for (const auto& e : test_list.entries) {
                if (seen.count(detail::canonical_or_self(e.image)))
                    throw InvalidArgument("image '" + e.image.string() +
                                          "' is in both train and test manifests");
            }
            corpus.test = detail::load_split(test_manifest, spec, corpus.train.size());
        }
    } else {
        const std::size_t n_train = config.get_uint("synthetic_train");
        const std::size_t n_test = config.get_uint("synthetic_test");
        if (n_train == 0 || (need_test && n_test == 0))
            throw ConfigError("set train_manifest/test_manifest or synthetic_train/synthetic_test");
        const std::size_t size = config.get_uint("synthetic_size");
        SeededRng rng(config.get_uint("synthetic_seed"));
        for (std::size_t i = 0; i < n_train + n_test; ++i) {
            NamedImage item{detail::synthetic_name(i), generate_random_phantom(size, rng), {}};
            item.degraded = degrade(item.clean, spec, i);
            (i < n_train ? corpus.train : corpus.test).push_back(std::move(item));
        }
    }
    if (corpus.train.empty() || (need_test && corpus.test.empty()))
        throw InvalidArgument("benchmark needs at least one train and one test image");
    return corpus;
}

/// Trains rodeo and the l2 baseline on the train split, evaluates every
/// method on the test split. When the config leaves l2_epochs at 0 the
/// baseline gets max_iter epochs, the iteration allowance of rodeo.
inline BenchResult run_benchmark(const RunConfig& config, const BenchCorpus& corpus) {
    const TrainConfig train = config.train_config();
    const DegradationSpec spec = config.degradation();
    const std::size_t patch_size = config.get_uint("patch_size");
    const bool overlap = config.get_bool("overlap");
    const std::size_t reps = config.get_uint("timing_reps");
    const CsImageOptions cs = config.cs_options();
    const SparsifyingTransform transform = config.sparsifier();

    std::vector<ImageGrid> clean, degraded;
    for (const auto& item : corpus.train) {
        clean.push_back(item.clean);
        degraded.push_back(item.degraded);
    }
    const TrainingSet set = build_training_set(clean, degraded, patch_size);

    BenchResult result;
    result.header = config.report_header();

    auto timed = [](auto&& f) {
        const auto start = std::chrono::steady_clock::now();
        auto value = f();
        return std::pair{std::move(value),
                         std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()};
    };
    auto [robust, robust_seconds] = timed([&] { return train_robust(set, train); });
    TrainConfig l2_config = train;
    if (l2_config.epochs == 0) l2_config.epochs = train.max_iter;
    auto [l2, l2_seconds] = timed([&] { return train_l2_baseline(set, l2_config); });
    result.rodeo_iterations = robust.state.iteration;
    result.l2_epochs = l2.loss_history.size() - 1;

    const bool has_cs = !std::holds_alternative<ImpulseDegradation>(spec.modality);
    MetricReport rodeo_report, l2_report, cs_report, raw_report;
    MethodTiming rodeo_timing{"rodeo", robust_seconds, {}};
    MethodTiming l2_timing{"l2-baseline", l2_seconds, {}};
    MethodTiming cs_timing{"ista-cs", 0.0, {}};

    result.patches_per_image =
        extract_patches(corpus.test.front().degraded, patch_size, overlap ? patch_size / 2 : patch_size).count();
    for (const auto& item : corpus.test) {
        const ImageGrid& truth = item.clean;
        ImageGrid rodeo_out, l2_out;
        rodeo_timing.reconstruct_seconds.push_back(detail::median_seconds(
            reps, [&] { rodeo_out = reconstruct_image(robust.model, item.degraded, overlap); }));
        l2_timing.reconstruct_seconds.push_back(detail::median_seconds(
            reps, [&] { l2_out = reconstruct_image(l2.model, item.degraded, overlap); }));
        rodeo_report.add(evaluate(item.name, rodeo_out, truth));
        l2_report.add(evaluate(item.name, l2_out, truth));
        raw_report.add(evaluate(item.name, item.degraded, truth));

        if (!has_cs) continue;
        ImageGrid cs_out;
        if (const auto* ct = std::get_if<CtDegradation>(&spec.modality)) {
            const ProjectionSet proj = radon_forward(truth, uniform_angles(ct->spacing_deg));
            cs_timing.reconstruct_seconds.push_back(detail::median_seconds(
                reps, [&] { cs_out = cs_reconstruct_ct(proj, truth.height(), transform, cs); }));
        } else {
            const SamplingMask mask = degradation_mask(spec, truth.height(), truth.width());
            const ComplexGrid kspace = acquire_kspace(truth, mask);
            cs_timing.reconstruct_seconds.push_back(detail::median_seconds(
                reps, [&] { cs_out = cs_reconstruct_image(kspace, mask, transform, cs); }));
        }
        cs_report.add(evaluate(item.name, cs_out, truth));
    }

    result.reports.emplace_back("rodeo", std::move(rodeo_report));
    result.reports.emplace_back("l2-baseline", std::move(l2_report));
    if (has_cs) result.reports.emplace_back("ista-cs", std::move(cs_report));
    result.reports.emplace_back("raw", std::move(raw_report));
    result.timings = {rodeo_timing, l2_timing};
    if (has_cs) {
        result.timings.push_back(cs_timing);
        const double rodeo_median = rodeo_timing.median_seconds();
        if (rodeo_median > 0.0) result.ista_over_rodeo = cs_timing.median_seconds() / rodeo_median;
    }
    return result;
}

inline BenchResult run_benchmark(const RunConfig& config) {
    return run_benchmark(config, load_bench_corpus(config));
}

/// `method,nmse_mean,nmse_std,psnr_mean,psnr_std,ssim_mean,ssim_std`
inline std::string summary_csv(const BenchResult& result) {
    std::string out = result.header + "method,nmse_mean,nmse_std,psnr_mean,psnr_std,ssim_mean,ssim_std\n";
    const auto f = MetricReport::format_number;
    for (const auto& [name, report] : result.reports) {
        const auto n = report.aggregate(&MetricRow::nmse);
        const auto p = report.aggregate(&MetricRow::psnr);
        const auto s = report.aggregate(&MetricRow::ssim);
        out += name + "," + f(n.mean) + "," + f(n.stddev) + "," + f(p.mean) + "," + f(p.stddev) + "," +
               f(s.mean) + "," + f(s.stddev) + "\n";
    }
    return out;
}

/// `method,train_seconds,median_image_seconds,median_patch_seconds` plus a
/// trailing `ista_over_rodeo` ratio row.
inline std::string timing_csv(const BenchResult& result) {
    std::string out = result.header + "method,train_seconds,median_image_seconds,median_patch_seconds\n";
    const auto f = MetricReport::format_number;
    for (const auto& t : result.timings) {
        const double image = t.median_seconds();
        const double patch =
            t.method == "ista-cs" ? 0.0 : image / static_cast<double>(result.patches_per_image);
        out += t.method + "," + f(t.train_seconds) + "," + f(image) + "," + f(patch) + "\n";
    }
    out += "ista_over_rodeo," + f(result.ista_over_rodeo) + ",,\n";
    return out;
}

/// Writes `<method>.csv`, `summary.csv` and `timing.csv` into `dir`. Only
/// timing.csv carries wall-clock values.
inline void write_bench_reports(const BenchResult& result, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    for (const auto& [name, report] : result.reports) {
        write_file_atomic(dir / (name + ".csv"), result.header + report.to_csv(false));
    }
    write_file_atomic(dir / "summary.csv", summary_csv(result));
    write_file_atomic(dir / "timing.csv", timing_csv(result));
}

} // namespace rodeo
