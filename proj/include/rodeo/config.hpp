#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rodeo/autoencoder.hpp"
#include "rodeo/cs_solvers.hpp"
#include "rodeo/degrade.hpp"
#include "rodeo/error.hpp"
#include "rodeo/mask.hpp"
#include "rodeo/radon.hpp"
#include "rodeo/sparsify.hpp"
#include "rodeo/split_bregman.hpp"

namespace rodeo {

/// Bad configuration key or value (a usage error, not a data error).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

/// Re-raises invalid values found while building typed settings as config errors.
template <typename F>
auto as_config_error(F&& f) {
    try {
        return f();
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }
}

} // namespace detail

/// First line of every report; marks files whose header is a config.
inline constexpr const char* report_magic = "# rodeo-report v1";

/// Flat key=value run configuration. Every key has a default; unknown keys
/// are rejected. The canonical listing is sorted by key.
class RunConfig {
public:
    RunConfig() : values_(defaults()) {}

    static const std::map<std::string, std::string>& defaults() {
        static const std::map<std::string, std::string> table = {
            {"activation", "tanh"},
            {"atanh_clamp_eps", "1e-6"},
            {"bregman_update", "paper-literal"},
            {"ct_spacing", "5"},
            {"degradation_seed", "7"},
            {"fbp_window", "ram-lak"},
            {"hidden", "256"},
            {"impulse_fraction", "0.15"},
            {"ista_lambda", "0.002"},
            {"ista_max_iter", "200"},
            {"ista_tol", "0"},
            {"l2_epochs", "0"},
            {"l2_learning_rate", "0.005"},
            {"lambda", "1"},
            {"mask_kind", "random"},
            {"max_iter", "500"},
            {"modality", "mri"},
            {"mu", "1"},
            {"overlap", "false"},
            {"p4", "coupled"},
            {"patch_size", "32"},
            {"periodic_stride", "2"},
            {"radial_lines", "24"},
            {"rel_tol", "1e-4"},
            {"ridge_eps", "1e-6"},
            {"sampling_fraction", "0.5"},
            {"seed", "0"},
            {"sparsifier", "haar"},
            {"synthetic_seed", "0"},
            {"synthetic_size", "128"},
            {"synthetic_test", "0"},
            {"synthetic_train", "0"},
            {"test_manifest", ""},
            {"timing_reps", "5"},
            {"train_manifest", ""},
            {"vd_decay", "1"},
            {"wavelet_levels", "3"},
        };
        return table;
    }

    void set(const std::string& key, const std::string& value) {
        if (!defaults().count(key)) throw ConfigError("unknown config key '" + key + "'");
        values_[key] = value;
    }

    /// Applies a `key=value` assignment.
    void assign(const std::string& assignment) {
        const auto eq = assignment.find('=');
        if (eq == std::string::npos) throw ConfigError("expected key=value, got '" + assignment + "'");
        set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
    }

    /// Parses a config file, or the embedded header of a report file.
    static RunConfig parse(const std::string& text) {
        RunConfig config;
        std::istringstream in(text);
        std::string line;
        bool report = false;
        bool first = true;
        while (std::getline(in, line)) {
            if (first && line == report_magic) {
                report = true;
                first = false;
                continue;
            }
            first = false;
            if (report) {
                if (line.rfind("# ", 0) != 0) break;
                config.assign(line.substr(2));
                continue;
            }
            if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            if (trim(line).empty()) continue;
            config.assign(line);
        }
        return config;
    }

    static RunConfig load(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
        std::stringstream buffer;
        buffer << in.rdbuf();
        return parse(buffer.str());
    }

    const std::string& get(const std::string& key) const {
        const auto it = values_.find(key);
        if (it == values_.end()) throw ConfigError("unknown config key '" + key + "'");
        return it->second;
    }

    double get_double(const std::string& key) const {
        try {
            std::size_t used = 0;
            const double v = std::stod(get(key), &used);
            if (used != get(key).size()) throw std::invalid_argument("trailing characters");
            return v;
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception&) {
            throw ConfigError("config key '" + key + "' expects a number, got '" + get(key) + "'");
        }
    }

    std::uint64_t get_uint(const std::string& key) const {
        const std::string& s = get(key);
        try {
            std::size_t used = 0;
            if (!s.empty() && s[0] == '-') throw std::invalid_argument("negative");
            const auto v = std::stoull(s, &used);
            if (used != s.size()) throw std::invalid_argument("trailing characters");
            return v;
        } catch (const std::exception&) {
            throw ConfigError("config key '" + key + "' expects a non-negative integer, got '" + s + "'");
        }
    }

    bool get_bool(const std::string& key) const {
        const std::string& s = get(key);
        if (s == "true" || s == "1" || s == "yes") return true;
        if (s == "false" || s == "0" || s == "no") return false;
        throw ConfigError("config key '" + key + "' expects true/false, got '" + s + "'");
    }

    /// Sorted `key=value` lines.
    std::string canonical() const {
        std::string out;
        for (const auto& [k, v] : values_) out += k + "=" + v + "\n";
        return out;
    }

    /// Report header: magic line then `# key=value` lines.
    std::string report_header() const {
        std::string out = std::string(report_magic) + "\n";
        for (const auto& [k, v] : values_) out += "# " + k + "=" + v + "\n";
        return out;
    }

    TrainConfig train_config() const {
        return detail::as_config_error([&] {
            TrainConfig c;
            c.hidden = static_cast<Eigen::Index>(get_uint("hidden"));
            c.lambda = get_double("lambda");
            c.mu = get_double("mu");
            c.max_iter = get_uint("max_iter");
            c.rel_tol = get_double("rel_tol");
            c.ridge_eps = get_double("ridge_eps");
            c.activation = parse_activation(get("activation"));
            c.atanh_clamp_eps = get_double("atanh_clamp_eps");
            c.bregman_update = parse_bregman_update(get("bregman_update"));
            c.p4 = parse_latent_update(get("p4"));
            c.seed = get_uint("seed");
            c.learning_rate = get_double("l2_learning_rate");
            c.epochs = get_uint("l2_epochs");
            c.validate();
            return c;
        });
    }

    DegradationSpec degradation() const {
        return detail::as_config_error([&] {
            DegradationSpec spec;
            spec.seed = get_uint("degradation_seed");
            const std::string& modality = get("modality");
            if (modality == "mri") {
                MriDegradation mri;
                mri.mask_kind = parse_mask_kind(get("mask_kind"));
                mri.mask_params.fraction = get_double("sampling_fraction");
                mri.mask_params.decay = get_double("vd_decay");
                mri.mask_params.lines = get_uint("radial_lines");
                mri.mask_params.stride = get_uint("periodic_stride");
                spec.modality = mri;
            } else if (modality == "ct") {
                spec.modality = CtDegradation{get_double("ct_spacing")};
            } else if (modality == "impulse") {
                spec.modality = ImpulseDegradation{get_double("impulse_fraction")};
            } else {
                throw ConfigError("modality must be mri, ct or impulse, got '" + modality + "'");
            }
            spec.validate();
            return spec;
        });
    }

    SparsifyingTransform sparsifier() const {
        return detail::as_config_error([&] {
            return SparsifyingTransform{parse_sparsifier(get("sparsifier")), get_uint("wavelet_levels")};
        });
    }

    CsImageOptions cs_options() const {
        CsImageOptions o;
        o.lambda = get_double("ista_lambda");
        o.max_iter = get_uint("ista_max_iter");
        o.tol = get_double("ista_tol");
        o.ista.seed = get_uint("seed");
        return o;
    }

    FbpWindow fbp_window() const {
        const std::string& w = get("fbp_window");
        if (w == "ram-lak") return FbpWindow::ram_lak;
        if (w == "hann") return FbpWindow::hann;
        throw ConfigError("fbp_window must be ram-lak or hann, got '" + w + "'");
    }

private:
    static std::string trim(const std::string& s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return "";
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    }

    std::map<std::string, std::string> values_;
};

} // namespace rodeo
