#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rodeo {

/// Precondition on an argument was violated (bad shape, bad parameter).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A persisted artifact (tensor, PGM, manifest, model bundle) is malformed.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An iterative solver produced a non-finite value or diverged.
class NumericFailure : public std::runtime_error {
public:
    NumericFailure(const std::string& what, std::size_t iteration)
        : std::runtime_error(what + " (iteration " + std::to_string(iteration) + ")"),
          iteration_(iteration) {}

    std::size_t iteration() const noexcept { return iteration_; }

private:
    std::size_t iteration_;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
    if (!condition) throw InvalidArgument(message);
}

} // namespace detail
} // namespace rodeo
