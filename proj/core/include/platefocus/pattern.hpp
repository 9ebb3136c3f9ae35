#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "platefocus/grid.hpp"
#include "platefocus/plate.hpp"

namespace platefocus {

inline constexpr std::size_t kPhaseBins = 360;
inline constexpr double kGainMax = 10.0;

/// k(i, j): non-negative gain of actuator i's unit-amplitude basic pattern at
/// phase j degrees. Actuator indices are zero-based here.
class GainSpectrum {
public:
    static constexpr std::size_t kEntries = kActuatorCount * kPhaseBins;

    double& at(std::size_t actuator, std::size_t phase_deg) { return k_[actuator * kPhaseBins + phase_deg]; }
    double at(std::size_t actuator, std::size_t phase_deg) const { return k_[actuator * kPhaseBins + phase_deg]; }

    double& operator[](std::size_t flat) { return k_[flat]; }
    double operator[](std::size_t flat) const { return k_[flat]; }

    const std::array<double, kEntries>& values() const noexcept { return k_; }

    /// Throws GainOutOfRange unless every entry lies in [0, gain_max].
    void validate(double gain_max = kGainMax) const;

    GainSpectrum operator+(const GainSpectrum& other) const;
    GainSpectrum scaled(double c) const;

    friend bool operator==(const GainSpectrum&, const GainSpectrum&) = default;

private:
    std::array<double, kEntries> k_{};
};

/// Per-actuator drive collapsed to one sinusoid A_i sin(wt + phi_i).
struct ActuatorPhasor {
    std::array<double, kActuatorCount> amplitude{};
    std::array<double, kActuatorCount> phase_deg{};

    std::complex<double> complex(std::size_t i) const;
    static ActuatorPhasor from_complex(const std::array<std::complex<double>, kActuatorCount>& z);

    friend bool operator==(const ActuatorPhasor&, const ActuatorPhasor&) = default;
};

/// Per-pixel RMS displacement over one period, in meters.
struct EnergyImage {
    Field values;
    std::uint64_t spec_hash = 0;
    double drive_frequency = 0.0;
};

/// e^{j*deg} for integer degrees; entries 180 apart are exact negatives.
std::complex<double> unit_phasor(std::size_t deg);

/// The five unit-amplitude, zero-phase response fields C_i(x, y). In the
/// undamped model they are real, so a drive phasor z_i yields the pixel
/// phasor sum_i z_i C_i. Phase j of the 5x360 basic-pattern set is C_i
/// rotated by e^{j*j}, so this cache stands in for all 1800 patterns.
class ResponseCache {
public:
    explicit ResponseCache(const ModalBasis& basis);

    const Field& field(std::size_t actuator) const { return fields_.at(actuator); }
    int nx() const noexcept { return fields_[0].nx(); }
    int ny() const noexcept { return fields_[0].ny(); }
    std::uint64_t spec_hash() const noexcept { return spec_hash_; }
    double drive_frequency() const noexcept { return drive_frequency_; }

private:
    std::array<Field, kActuatorCount> fields_;
    std::uint64_t spec_hash_ = 0;
    double drive_frequency_ = 0.0;
};

/// Time-domain superposition sum_{i,j} k(i,j) * P(i, A=1, phi=j).
PatternSeries superpose(const ResponseCache& cache, const GainSpectrum& gains,
                        int samples_per_period = kDefaultSamplesPerPeriod);
PatternSeries superpose(const ModalBasis& basis, const GainSpectrum& gains,
                        int samples_per_period = kDefaultSamplesPerPeriod);

/// E = sqrt(mean_s w_s^2) per pixel.
EnergyImage rms_energy(const PatternSeries& series);

/// Frequency-domain shortcut: |sum_i z_i C_i| / sqrt(2).
EnergyImage phasor_energy(const ResponseCache& cache, const GainSpectrum& gains);
EnergyImage phasor_energy(const ResponseCache& cache, const ActuatorPhasor& phasors);
EnergyImage phasor_energy(const ModalBasis& basis, const GainSpectrum& gains);

/// Same as phasor_energy but writes into `out` (resized on demand); used by
/// the annealer to avoid per-step allocation.
void phasor_energy_into(const ResponseCache& cache, const std::array<std::complex<double>, kActuatorCount>& z,
                        Field& out);

std::array<std::complex<double>, kActuatorCount> collapse_complex(const GainSpectrum& gains);
ActuatorPhasor collapse_gains(const GainSpectrum& gains);

/// Exact inverse of collapse for amplitudes that fit: each phasor is split
/// across the two integer-degree bins bracketing its phase. Throws
/// GainOutOfRange if a split gain would exceed gain_max.
GainSpectrum expand_phasors(const ActuatorPhasor& phasors, double gain_max = kGainMax);

/// Energy image of a virtual unit, zero-phase point source at `target`.
EnergyImage target_energy(const ModalBasis& basis, Point target);

}  // namespace platefocus
