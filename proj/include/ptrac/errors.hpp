#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ptrac {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad caller-supplied argument (device id, device count, CLI value).
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// Requested particle count exceeds the configured capacity.
class CapacityError : public Error {
public:
    using Error::Error;
};

/// Index range outside the ensemble.
class BoundsError : public Error {
public:
    using Error::Error;
};

/// Malformed input file. Carries the offending path and 1-based line (0 if
/// the problem is not tied to one line).
class ParseError : public Error {
public:
    ParseError(std::string path, std::size_t line, const std::string& what)
        : Error(path + (line ? ":" + std::to_string(line) : std::string()) +
                ": " + what),
          path_(std::move(path)), line_(line)
    {
    }

    const std::string& path() const noexcept { return path_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string path_;
    std::size_t line_;
};

/// Control parameters failed validation.
class ConfigError : public Error {
public:
    explicit ConfigError(std::vector<std::string> violations);

    const std::vector<std::string>& violations() const noexcept
    {
        return violations_;
    }

private:
    std::vector<std::string> violations_;
};

/// Data-region state machine violation (double create, use after delete, ...).
class LifecycleError : public Error {
public:
    using Error::Error;
};

/// A caller broke a concurrency contract, e.g. copy-back of a range that is
/// not owned by the region's device.
class ContractError : public Error {
public:
    using Error::Error;
};

/// Output could not be written.
class IoError : public Error {
public:
    using Error::Error;
};

/// One or more device tasks failed inside a parallel section.
class DeviceErrors : public Error {
public:
    struct Failure {
        int device_id;
        std::string message;
    };

    explicit DeviceErrors(std::vector<Failure> failures);

    const std::vector<Failure>& failures() const noexcept { return failures_; }

private:
    std::vector<Failure> failures_;
};

} // namespace ptrac
