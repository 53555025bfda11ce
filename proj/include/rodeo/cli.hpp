#pragma once

#include <algorithm>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rodeo/bench.hpp"
#include "rodeo/config.hpp"
#include "rodeo/cs_solvers.hpp"
#include "rodeo/degrade.hpp"
#include "rodeo/error.hpp"
#include "rodeo/io.hpp"
#include "rodeo/metrics.hpp"
#include "rodeo/model_io.hpp"
#include "rodeo/phantom.hpp"
#include "rodeo/pipeline.hpp"
#include "rodeo/split_bregman.hpp"

namespace rodeo {

enum ExitCode : int { exit_ok = 0, exit_usage = 1, exit_data = 2, exit_numeric = 3 };

/// Contrast gain of the `diff` export.
inline constexpr double diff_gain = 10.0;

namespace cli_detail {

struct ConfigFlags {
    std::string file;
    std::vector<std::string> overrides;
    bool print = false;

    void attach(CLI::App& cmd) {
        cmd.add_option("--config", file, "key=value config file or a report with an embedded config");
        cmd.add_option("--set", overrides, "override one key (key=value), repeatable");
        cmd.add_flag("--print-config", print, "print the resolved config and exit");
    }

    RunConfig resolve() const {
        RunConfig config = file.empty() ? RunConfig{} : RunConfig::load(file);
        for (const auto& o : overrides) config.assign(o);
        return config;
    }
};

inline void print_summary(std::ostream& out, const BenchResult& result) {
    out << "method,nmse_mean,psnr_mean,ssim_mean\n";
    for (const auto& [name, report] : result.reports) {
        out << name << "," << MetricReport::format_number(report.aggregate(&MetricRow::nmse).mean) << ","
            << MetricReport::format_number(report.aggregate(&MetricRow::psnr).mean) << ","
            << MetricReport::format_number(report.aggregate(&MetricRow::ssim).mean) << "\n";
    }
}

} // namespace cli_detail

/// Runs one subcommand. `args` excludes the program name. Exit codes:
/// 0 success, 1 usage or config error, 2 data/format error, 3 numeric failure.
inline int command_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"rodeo: robust autoencoder reconstruction toolkit", "rodeo"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "show help for every subcommand");

    // phantom
    std::string kind = "shepp-logan";
    std::size_t size = 128;
    std::uint64_t phantom_seed = 0;
    std::string out_path;
    auto* phantom = app.add_subcommand("phantom", "write a test phantom");
    phantom->add_option("--kind", kind, "shepp-logan, disks or random")->capture_default_str();
    phantom->add_option("--size", size, "side length in pixels")->capture_default_str();
    phantom->add_option("--seed", phantom_seed, "seed for --kind random")->capture_default_str();
    phantom->add_option("--out", out_path, "output (.pgm or RDT1)")->required();

    // degrade
    std::string in_path, mask_out, sinogram_out;
    std::uint64_t image_index = 0;
    cli_detail::ConfigFlags degrade_flags;
    auto* degrade_cmd = app.add_subcommand("degrade", "simulate acquisition and crude inversion");
    degrade_cmd->add_option("--in", in_path, "clean image (.pgm or RDT1)")->required();
    degrade_cmd->add_option("--out", out_path, "degraded image")->required();
    degrade_cmd->add_option("--index", image_index, "image index for per-image impulse streams");
    degrade_cmd->add_option("--mask-out", mask_out, "also write the MRI sampling mask (RDT1)");
    degrade_cmd->add_option("--sinogram-out", sinogram_out, "also write the CT sinogram (RDT1 + .angles)");
    degrade_flags.attach(*degrade_cmd);

    // train
    cli_detail::ConfigFlags train_flags;
    std::string model_dir;
    auto* train_cmd = app.add_subcommand("train", "train a robust autoencoder on the train split");
    train_cmd->add_option("--out", model_dir, "model directory");
    train_flags.attach(*train_cmd);

    // reconstruct
    bool overlap = false;
    auto* recon_cmd = app.add_subcommand("reconstruct", "de-alias an image patch-wise with a trained model");
    recon_cmd->add_option("--model", model_dir, "model directory")->required();
    recon_cmd->add_option("--in", in_path, "degraded image")->required();
    recon_cmd->add_option("--out", out_path, "reconstruction")->required();
    recon_cmd->add_flag("--overlap", overlap, "half-overlapping patches, averaged");

    // cs-recon
    cli_detail::ConfigFlags cs_flags;
    auto* cs_cmd = app.add_subcommand("cs-recon", "simulate acquisition of a clean image and run ISTA");
    cs_cmd->add_option("--in", in_path, "clean image")->required();
    cs_cmd->add_option("--out", out_path, "reconstruction")->required();
    cs_flags.attach(*cs_cmd);

    // metrics / diff
    std::string a_path, b_path;
    auto* metrics_cmd = app.add_subcommand("metrics", "NMSE, PSNR and SSIM of --a against reference --b");
    metrics_cmd->add_option("--a", a_path, "estimate")->required();
    metrics_cmd->add_option("--b", b_path, "reference")->required();
    auto* diff_cmd = app.add_subcommand("diff", "export |a - b| x 10, clamped to [0, 1], as PGM");
    diff_cmd->add_option("--a", a_path, "estimate")->required();
    diff_cmd->add_option("--b", b_path, "reference")->required();
    diff_cmd->add_option("--out", out_path, "output PGM")->required();

    // bench
    cli_detail::ConfigFlags bench_flags;
    std::string bench_dir = "bench_out";
    auto* bench_cmd = app.add_subcommand("bench", "train, evaluate every method, write CSV reports");
    bench_cmd->add_option("--out", bench_dir, "report directory")->capture_default_str();
    bench_flags.attach(*bench_cmd);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        const CLI::App* sub = nullptr;
        for (const auto* s : app.get_subcommands()) sub = s;
        err << (sub ? sub->help() : app.help());
        return exit_usage;
    }

    try {
        if (phantom->parsed()) {
            ImageGrid image;
            if (kind == "random") {
                SeededRng rng(phantom_seed);
                image = generate_random_phantom(size, rng);
            } else {
                image = generate_phantom(parse_phantom_kind(kind), size);
            }
            save_image(out_path, image);
        } else if (degrade_cmd->parsed()) {
            const RunConfig config = degrade_flags.resolve();
            if (degrade_flags.print) {
                out << config.canonical();
                return exit_ok;
            }
            const DegradationSpec spec = config.degradation();
            const ImageGrid image = load_image(in_path);
            save_image(out_path, degrade(image, spec, image_index));
            if (!mask_out.empty()) {
                if (!std::holds_alternative<MriDegradation>(spec.modality))
                    throw ConfigError("--mask-out needs modality=mri");
                write_tensor(mask_out, mask_to_tensor(degradation_mask(spec, image.height(), image.width())));
            }
            if (!sinogram_out.empty()) {
                const auto* ct = std::get_if<CtDegradation>(&spec.modality);
                if (!ct) throw ConfigError("--sinogram-out needs modality=ct");
                write_projections(sinogram_out, radon_forward(image, uniform_angles(ct->spacing_deg)));
            }
        } else if (train_cmd->parsed()) {
            const RunConfig config = train_flags.resolve();
            if (train_flags.print) {
                out << config.canonical();
                return exit_ok;
            }
            if (model_dir.empty()) throw ConfigError("train needs --out");
            const TrainConfig train = config.train_config();
            const BenchCorpus corpus = load_bench_corpus(config, false);
            std::vector<ImageGrid> clean, degraded;
            for (const auto& item : corpus.train) {
                clean.push_back(item.clean);
                degraded.push_back(item.degraded);
            }
            const TrainingSet set = build_training_set(clean, degraded, config.get_uint("patch_size"));
            const RobustTrainingResult result = train_robust(set, train);
            save_model(result.model, model_dir);
            out << "images=" << corpus.train.size() << " samples=" << set.samples()
                << " iterations=" << result.state.iteration
                << " l1=" << MetricReport::format_number(result.state.l1_history.back()) << "\n";
        } else if (recon_cmd->parsed()) {
            const AutoencoderModel model = load_model(model_dir);
            const ImageGrid degraded = load_image(in_path);
            ReconstructionTiming timing;
            save_image(out_path, reconstruct_image(model, degraded, overlap, &timing));
            out << "patches=" << timing.patches
                << " seconds=" << MetricReport::format_number(timing.seconds) << "\n";
        } else if (cs_cmd->parsed()) {
            const RunConfig config = cs_flags.resolve();
            if (cs_flags.print) {
                out << config.canonical();
                return exit_ok;
            }
            const DegradationSpec spec = config.degradation();
            const ImageGrid image = load_image(in_path);
            const SparsifyingTransform transform = config.sparsifier();
            const CsImageOptions options = config.cs_options();
            ImageGrid result;
            if (const auto* ct = std::get_if<CtDegradation>(&spec.modality)) {
                const ProjectionSet proj = radon_forward(image, uniform_angles(ct->spacing_deg));
                result = cs_reconstruct_ct(proj, image.height(), transform, options);
            } else if (std::holds_alternative<MriDegradation>(spec.modality)) {
                const SamplingMask mask = degradation_mask(spec, image.height(), image.width());
                result = cs_reconstruct_image(acquire_kspace(image, mask), mask, transform, options);
            } else {
                throw ConfigError("cs-recon supports modality=mri or modality=ct");
            }
            save_image(out_path, result);
        } else if (metrics_cmd->parsed()) {
            const ImageGrid a = load_image(a_path);
            const ImageGrid b = load_image(b_path);
            const MetricRow row = evaluate(std::filesystem::path(a_path).filename().string(), a, b);
            out << "nmse,psnr,ssim\n"
                << MetricReport::format_number(row.nmse) << "," << MetricReport::format_number(row.psnr)
                << "," << MetricReport::format_number(row.ssim) << "\n";
        } else if (diff_cmd->parsed()) {
            const ImageGrid a = load_image(a_path);
            const ImageGrid b = load_image(b_path);
            detail::require(a.same_shape(b), "images differ in shape");
            ImageGrid d(a.height(), a.width());
            for (std::size_t i = 0; i < d.size(); ++i)
                d.data()[i] = std::min(1.0, diff_gain * std::abs(a.data()[i] - b.data()[i]));
            write_file_atomic(out_path, encode_pgm_range(d, 0.0, 1.0, 8));
        } else if (bench_cmd->parsed()) {
            const RunConfig config = bench_flags.resolve();
            if (bench_flags.print) {
                out << config.canonical();
                return exit_ok;
            }
            const BenchResult result = run_benchmark(config);
            write_bench_reports(result, bench_dir);
            cli_detail::print_summary(out, result);
            out << "ista_over_rodeo=" << MetricReport::format_number(result.ista_over_rodeo) << "\n";
        }
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return exit_usage;
    } catch (const NumericFailure& e) {
        err << "numeric failure: " << e.what() << "\n";
        return exit_numeric;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_data;
    }
    return exit_ok;
}

} // namespace rodeo
