#pragma once

#include <stdexcept>
#include <string>

namespace platefocus {

enum class ErrorKind {
    InvalidSpec,
    Resonance,
    OutOfDomain,
    UnsupportedWaveShape,
    FrequencyMismatch,
    GainOutOfRange,
    EmptySeries,
    DimensionMismatch,
    Config,
    InvalidDuty,
    SampleRateTooLow,
    WindowNotIntegerPeriods,
    BadMagic,
    BadVersion,
    BadCrc,
    Truncated,
    Socket,
    ReceiverTimeout,
    FingerprintMismatch,
    Io,
};

const char* to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries one of the kinds above so
/// callers (and the CLI exit-code mapping) can dispatch without parsing text.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what);

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace platefocus
