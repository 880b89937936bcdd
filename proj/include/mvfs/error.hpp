#pragma once

#include <stdexcept>
#include <string>

namespace mvfs {

/// Broad failure classes; the CLI maps each one to its own exit code.
enum class ErrorKind { config, data, numerical };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

struct InvalidDimension : Error {
    explicit InvalidDimension(const std::string& what) : Error(ErrorKind::config, what) {}
};

struct InvalidSampleSize : Error {
    explicit InvalidSampleSize(const std::string& what) : Error(ErrorKind::config, what) {}
};

struct DomainError : Error {
    explicit DomainError(const std::string& what) : Error(ErrorKind::config, what) {}
};

struct DataError : Error {
    explicit DataError(const std::string& what) : Error(ErrorKind::data, what) {}
};

/// Raised when a matrix has no principal direction (all zero) or a
/// covariance is too far from positive semidefinite to factor.
struct DegenerateMatrix : Error {
    explicit DegenerateMatrix(const std::string& what) : Error(ErrorKind::numerical, what) {}
};

}  // namespace mvfs
