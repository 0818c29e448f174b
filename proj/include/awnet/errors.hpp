#pragma once

#include <stdexcept>
#include <string>

namespace awnet {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Model/architecture misconfiguration (shape mismatches, invalid hyperparameters).
struct ConfigError : Error {
    using Error::Error;
};

// Bad runtime input to an operation (wrong spatial size, out-of-range argument).
struct InputError : Error {
    using Error::Error;
};

// Dataset ingestion problems: missing files, unreadable rasters, size mismatches.
struct DataError : Error {
    using Error::Error;
};

// Checkpoint / archive problems.
struct IoError : Error {
    using Error::Error;
};

}  // namespace awnet
