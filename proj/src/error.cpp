#include "actukit/error.hpp"

namespace actukit {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::Domain: return "domain error";
    case ErrorKind::Config: return "configuration error";
    case ErrorKind::Format: return "format error";
    case ErrorKind::Input: return "input error";
    case ErrorKind::Alignment: return "alignment error";
    case ErrorKind::Estimation: return "estimation error";
    case ErrorKind::Fit: return "fit error";
    case ErrorKind::Metric: return "metric error";
    }
    return "error";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), message_(what) {}

bool Error::is_user_error() const noexcept {
    switch (kind_) {
    case ErrorKind::Domain:
    case ErrorKind::Config:
    case ErrorKind::Format:
    case ErrorKind::Input:
    case ErrorKind::Alignment:
        return true;
    default:
        return false;
    }
}

} // namespace actukit
