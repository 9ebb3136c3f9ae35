#include "platefocus/errors.hpp"

namespace platefocus {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidSpec: return "InvalidSpec";
        case ErrorKind::Resonance: return "ResonanceError";
        case ErrorKind::OutOfDomain: return "OutOfDomain";
        case ErrorKind::UnsupportedWaveShape: return "UnsupportedWaveShape";
        case ErrorKind::FrequencyMismatch: return "FrequencyMismatch";
        case ErrorKind::GainOutOfRange: return "GainOutOfRange";
        case ErrorKind::EmptySeries: return "EmptySeries";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::Config: return "ConfigError";
        case ErrorKind::InvalidDuty: return "InvalidDuty";
        case ErrorKind::SampleRateTooLow: return "SampleRateTooLow";
        case ErrorKind::WindowNotIntegerPeriods: return "WindowNotIntegerPeriods";
        case ErrorKind::BadMagic: return "BadMagic";
        case ErrorKind::BadVersion: return "BadVersion";
        case ErrorKind::BadCrc: return "BadCrc";
        case ErrorKind::Truncated: return "Truncated";
        case ErrorKind::Socket: return "SocketError";
        case ErrorKind::ReceiverTimeout: return "ReceiverTimeout";
        case ErrorKind::FingerprintMismatch: return "FingerprintMismatch";
        case ErrorKind::Io: return "IoError";
    }
    return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

}  // namespace platefocus
