#pragma once

#include <stdexcept>
#include <string>

namespace actukit {

/// Broad failure classes. The CLI maps Domain/Config/Format/Input/Alignment
/// to exit code 1 (user error) and Estimation/Fit/Metric to exit code 2.
enum class ErrorKind {
    Domain,
    Config,
    Format,
    Input,
    Alignment,
    Estimation,
    Fit,
    Metric,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what);
    ErrorKind kind() const noexcept { return kind_; }
    /// what() without the kind prefix.
    const std::string& message() const noexcept { return message_; }
    bool is_user_error() const noexcept;

private:
    ErrorKind kind_;
    std::string message_;
};

class DomainError : public Error {
public:
    explicit DomainError(const std::string& w) : Error(ErrorKind::Domain, w) {}
};
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& w) : Error(ErrorKind::Config, w) {}
};
class FormatError : public Error {
public:
    explicit FormatError(const std::string& w) : Error(ErrorKind::Format, w) {}
};
class InputError : public Error {
public:
    explicit InputError(const std::string& w) : Error(ErrorKind::Input, w) {}
};
class AlignmentError : public Error {
public:
    explicit AlignmentError(const std::string& w) : Error(ErrorKind::Alignment, w) {}
};
class EstimationError : public Error {
public:
    explicit EstimationError(const std::string& w) : Error(ErrorKind::Estimation, w) {}
};
class MetricError : public Error {
public:
    explicit MetricError(const std::string& w) : Error(ErrorKind::Metric, w) {}
};

/// Carries the best residual reached so scripts can report how close it got.
class FitError : public Error {
public:
    FitError(const std::string& w, double residual = -1.0)
        : Error(ErrorKind::Fit, w), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

} // namespace actukit
