#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <Eigen/Core>

#include "rodeo/autoencoder.hpp"
#include "rodeo/error.hpp"
#include "rodeo/io.hpp"

namespace rodeo {

inline constexpr int model_format_version = 1;

inline Tensor matrix_to_tensor(const Eigen::MatrixXd& m) {
    Tensor t{{static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols())}, {}};
    t.values.reserve(m.size());
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) t.values.push_back(m(r, c));
    return t;
}

inline Eigen::MatrixXd tensor_to_matrix(const Tensor& t) {
    if (t.shape.size() != 2) throw FormatError("expected a rank-2 tensor");
    Eigen::MatrixXd m(t.shape[0], t.shape[1]);
    for (std::size_t r = 0; r < t.shape[0]; ++r)
        for (std::size_t c = 0; c < t.shape[1]; ++c) m(r, c) = t.values[r * t.shape[1] + c];
    return m;
}

/// Model bundle: manifest.txt (key=value) plus w_enc.rdt and w_dec.rdt.
inline void save_model(const AutoencoderModel& model, const std::filesystem::path& dir) {
    model.validate();
    std::filesystem::create_directories(dir);
    write_tensor(dir / "w_enc.rdt", matrix_to_tensor(model.w_enc));
    write_tensor(dir / "w_dec.rdt", matrix_to_tensor(model.w_dec));
    std::ostringstream manifest;
    manifest << "activation=" << to_string(model.activation) << "\n"
             << "d=" << model.input_dim() << "\n"
             << "hidden=" << model.hidden() << "\n"
             << "format_version=" << model_format_version << "\n";
    write_file_atomic(dir / "manifest.txt", manifest.str());
}

/// Loads a bundle. The manifest's activation is authoritative.
inline AutoencoderModel load_model(const std::filesystem::path& dir) {
    std::ifstream in(dir / "manifest.txt");
    if (!in) throw FormatError("missing model manifest in '" + dir.string() + "'");
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw FormatError("malformed manifest line '" + line + "'");
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    for (const char* key : {"activation", "d", "hidden", "format_version"}) {
        if (!kv.count(key)) throw FormatError(std::string("model manifest lacks '") + key + "'");
    }
    AutoencoderModel model;
    long d = 0, hidden = 0;
    try {
        model.activation = parse_activation(kv["activation"]);
        d = std::stol(kv["d"]);
        hidden = std::stol(kv["hidden"]);
        if (std::stoi(kv["format_version"]) != model_format_version) {
            throw FormatError("unsupported model format_version " + kv["format_version"]);
        }
    } catch (const FormatError&) {
        throw;
    } catch (const std::exception& e) {
        throw FormatError(std::string("invalid model manifest: ") + e.what());
    }
    model.w_enc = tensor_to_matrix(read_tensor(dir / "w_enc.rdt"));
    model.w_dec = tensor_to_matrix(read_tensor(dir / "w_dec.rdt"));
    if (model.w_enc.rows() != hidden || model.w_enc.cols() != d + 1 || model.w_dec.rows() != d ||
        model.w_dec.cols() != hidden) {
        throw FormatError("model tensors do not match manifest dims d=" + std::to_string(d) +
                          " hidden=" + std::to_string(hidden));
    }
    return model;
}

} // namespace rodeo
