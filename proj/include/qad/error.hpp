#pragma once

#include <stdexcept>
#include <string>

namespace qad {

/// Base class for every error raised by the library.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad or unusable input data: empty samples, unreadable files,
/// duplicate headers, queries outside the observed range.
class data_error : public error {
public:
    using error::error;
};

/// Input that is well-formed but too degenerate to estimate anything from
/// (fewer than two observations, resolution mismatches, non-convergence).
class numeric_error : public error {
public:
    using error::error;
};

/// Violated preconditions on arguments (invalid parameters, bad indices).
class argument_error : public error {
public:
    using error::error;
};

}  // namespace qad
