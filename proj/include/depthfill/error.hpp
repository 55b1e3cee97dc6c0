#pragma once

#include <stdexcept>
#include <string>

namespace depthfill {

// Shape or extent disagreement between operands.
struct DimensionError : std::invalid_argument {
    explicit DimensionError(const std::string& msg) : std::invalid_argument(msg) {}
};

// An operation received an empty cloud, dataset, or tensor where at least
// one element is required.
struct EmptyInputError : std::invalid_argument {
    explicit EmptyInputError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Degenerate numeric input: all-zero mask, no valid pixels, non-positive
// prediction under an inverse metric.
struct DomainError : std::domain_error {
    explicit DomainError(const std::string& msg) : std::domain_error(msg) {}
};

// File-level failure; message names the offending file.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed serialized payload: bad magic, header, or length.
struct FormatError : std::runtime_error {
    explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace depthfill
