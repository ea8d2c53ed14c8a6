#pragma once

#include <stdexcept>
#include <string>

namespace flightdesk {

// Invalid or inconsistent configuration (empty alphabets, N = 0, bad ranges).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed or inconsistent data (corpus files, checkpoints, records).
struct DataError : std::runtime_error {
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Parse failure in a line-delimited file; carries the 1-based line number.
struct ParseError : DataError {
    ParseError(const std::string& what, std::size_t line)
        : DataError(what + " (line " + std::to_string(line) + ")"), line_number(line) {}
    std::size_t line_number;
};

// NaN/Inf detected in model parameters or losses.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Encoded sequence does not fit the model's maximum length.
struct LengthError : DataError {
    LengthError(std::size_t got, std::size_t max)
        : DataError("sequence length " + std::to_string(got) + " exceeds maximum " +
                    std::to_string(max)) {}
};

}  // namespace flightdesk
