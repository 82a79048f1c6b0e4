#include "oams/errors.hpp"

namespace oams {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::MultichainPolicy: return "MultichainPolicy";
    case ErrorKind::NotCommunicating: return "NotCommunicating";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::InvalidAlpha: return "InvalidAlpha";
    case ErrorKind::ObservationOutOfRange: return "ObservationOutOfRange";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::EmptyModelSet: return "EmptyModelSet";
    case ErrorKind::InvalidMdp: return "InvalidMdp";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

} // namespace oams
