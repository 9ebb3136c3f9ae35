#include "platefocus/pattern.hpp"

#include <cmath>
#include <string>
#include <numbers>

#include "platefocus/errors.hpp"

namespace platefocus {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kDegToRad = std::numbers::pi / 180.0;

const std::array<std::complex<double>, kPhaseBins>& phasor_table() {
    static const auto table = [] {
        std::array<std::complex<double>, kPhaseBins> t{};
        for (std::size_t d = 0; d < kPhaseBins / 2; ++d) {
            const auto deg = static_cast<std::int64_t>(d);
            // cos(x) = sin(x + quarter turn)
            t[d] = {sin_turns(deg + 90, 360), sin_turns(deg, 360)};
            t[d + kPhaseBins / 2] = -t[d];
        }
        return t;
    }();
    return table;
}

double normalize_degrees(double deg) {
    double d = std::fmod(deg, 360.0);
    if (d < 0) d += 360.0;
    if (d >= 360.0) d = 0.0;
    return d;
}

}  // namespace

void GainSpectrum::validate(double gain_max) const {
    for (std::size_t f = 0; f < kEntries; ++f) {
        const double v = k_[f];
        if (!(v >= 0.0 && v <= gain_max))
            throw Error(ErrorKind::GainOutOfRange, "gain k(" + std::to_string(f / kPhaseBins + 1) + ", " +
                                                       std::to_string(f % kPhaseBins) + ") = " + std::to_string(v) +
                                                       " outside [0, " + std::to_string(gain_max) + "]");
    }
}

GainSpectrum GainSpectrum::operator+(const GainSpectrum& other) const {
    GainSpectrum out;
    for (std::size_t f = 0; f < kEntries; ++f) out.k_[f] = k_[f] + other.k_[f];
    return out;
}

GainSpectrum GainSpectrum::scaled(double c) const {
    GainSpectrum out;
    for (std::size_t f = 0; f < kEntries; ++f) out.k_[f] = k_[f] * c;
    return out;
}

std::complex<double> ActuatorPhasor::complex(std::size_t i) const {
    return std::polar(amplitude.at(i), phase_deg.at(i) * kDegToRad);
}

ActuatorPhasor ActuatorPhasor::from_complex(const std::array<std::complex<double>, kActuatorCount>& z) {
    ActuatorPhasor p;
    for (std::size_t i = 0; i < kActuatorCount; ++i) {
        p.amplitude[i] = std::abs(z[i]);
        p.phase_deg[i] = p.amplitude[i] == 0.0 ? 0.0 : normalize_degrees(std::arg(z[i]) / kDegToRad);
    }
    return p;
}

std::complex<double> unit_phasor(std::size_t deg) { return phasor_table().at(deg % kPhaseBins); }

ResponseCache::ResponseCache(const ModalBasis& basis)
    : spec_hash_(basis.fingerprint()), drive_frequency_(basis.drive_frequency()) {
    for (std::size_t i = 0; i < kActuatorCount; ++i) fields_[i] = actuator_response_field(basis, i);
}

PatternSeries superpose(const ResponseCache& cache, const GainSpectrum& gains, int samples_per_period) {
    gains.validate();
    if (samples_per_period < 3) throw Error(ErrorKind::InvalidSpec, "need at least 3 samples per period");
    const std::int64_t S = samples_per_period;
    PatternSeries series;
    series.frames.reserve(static_cast<std::size_t>(S));
    for (std::int64_t s = 0; s < S; ++s) {
        // Scalar drive of actuator i at sample s: sum_j k(i,j) sin(theta_s + j deg).
        std::array<double, kActuatorCount> drive{};
        for (std::size_t i = 0; i < kActuatorCount; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < kPhaseBins; ++j) {
                const double k = gains.at(i, j);
                if (k != 0.0) acc += k * sin_turns(360 * s + static_cast<std::int64_t>(j) * S, 360 * S);
            }
            drive[i] = acc;
        }
        Field frame(cache.nx(), cache.ny(), 0.0);
        for (std::size_t i = 0; i < kActuatorCount; ++i) {
            if (drive[i] == 0.0) continue;
            const Field& c = cache.field(i);
            for (std::size_t p = 0; p < frame.size(); ++p) frame[p] += c[p] * drive[i];
        }
        series.frames.push_back(std::move(frame));
        series.sample_phases.push_back(2.0 * std::numbers::pi * static_cast<double>(s) / static_cast<double>(S));
    }
    return series;
}

PatternSeries superpose(const ModalBasis& basis, const GainSpectrum& gains, int samples_per_period) {
    return superpose(ResponseCache(basis), gains, samples_per_period);
}

EnergyImage rms_energy(const PatternSeries& series) {
    if (series.frames.empty()) throw Error(ErrorKind::EmptySeries, "pattern series has no frames");
    const Field& first = series.frames.front();
    Field acc(first.nx(), first.ny(), 0.0);
    for (const Field& frame : series.frames) {
        if (!frame.same_shape(first)) throw Error(ErrorKind::DimensionMismatch, "frames differ in shape");
        for (std::size_t p = 0; p < acc.size(); ++p) acc[p] += frame[p] * frame[p];
    }
    const double inv_s = 1.0 / static_cast<double>(series.frames.size());
    for (double& v : acc.values()) v = std::sqrt(v * inv_s);
    return EnergyImage{std::move(acc), 0, 0.0};
}

void phasor_energy_into(const ResponseCache& cache, const std::array<std::complex<double>, kActuatorCount>& z,
                        Field& out) {
    if (out.nx() != cache.nx() || out.ny() != cache.ny()) out = Field(cache.nx(), cache.ny());
    std::array<const double*, kActuatorCount> c{};
    for (std::size_t i = 0; i < kActuatorCount; ++i) c[i] = cache.field(i).values().data();
    const std::size_t n = out.size();
    for (std::size_t p = 0; p < n; ++p) {
        double re = 0.0;
        double im = 0.0;
        for (std::size_t i = 0; i < kActuatorCount; ++i) {
            re += z[i].real() * c[i][p];
            im += z[i].imag() * c[i][p];
        }
        out[p] = std::sqrt(re * re + im * im) * kInvSqrt2;
    }
}

std::array<std::complex<double>, kActuatorCount> collapse_complex(const GainSpectrum& gains) {
    const auto& table = phasor_table();
    std::array<std::complex<double>, kActuatorCount> z{};
    for (std::size_t i = 0; i < kActuatorCount; ++i) {
        double re = 0.0;
        double im = 0.0;
        for (std::size_t j = 0; j < kPhaseBins; ++j) {
            const double k = gains.at(i, j);
            re += k * table[j].real();
            im += k * table[j].imag();
        }
        z[i] = {re, im};
    }
    return z;
}

ActuatorPhasor collapse_gains(const GainSpectrum& gains) { return ActuatorPhasor::from_complex(collapse_complex(gains)); }

EnergyImage phasor_energy(const ResponseCache& cache, const GainSpectrum& gains) {
    gains.validate();
    EnergyImage e{Field(cache.nx(), cache.ny()), cache.spec_hash(), cache.drive_frequency()};
    phasor_energy_into(cache, collapse_complex(gains), e.values);
    return e;
}

EnergyImage phasor_energy(const ResponseCache& cache, const ActuatorPhasor& phasors) {
    std::array<std::complex<double>, kActuatorCount> z{};
    for (std::size_t i = 0; i < kActuatorCount; ++i) {
        if (!(phasors.amplitude[i] >= 0.0) || !std::isfinite(phasors.amplitude[i]))
            throw Error(ErrorKind::GainOutOfRange, "phasor amplitude must be finite and non-negative");
        z[i] = phasors.complex(i);
    }
    EnergyImage e{Field(cache.nx(), cache.ny()), cache.spec_hash(), cache.drive_frequency()};
    phasor_energy_into(cache, z, e.values);
    return e;
}

EnergyImage phasor_energy(const ModalBasis& basis, const GainSpectrum& gains) {
    return phasor_energy(ResponseCache(basis), gains);
}

GainSpectrum expand_phasors(const ActuatorPhasor& phasors, double gain_max) {
    GainSpectrum g;
    const double sin1 = std::sin(kDegToRad);
    for (std::size_t i = 0; i < kActuatorCount; ++i) {
        const double A = phasors.amplitude[i];
        if (A == 0.0) continue;
        const double phi = normalize_degrees(phasors.phase_deg[i]);
        const double lower = std::floor(phi);
        const double t = phi - lower;
        const auto d = static_cast<std::size_t>(lower) % kPhaseBins;
        // A e^{j(d+t)} = alpha e^{jd} + beta e^{j(d+1)}
        g.at(i, d) += A * std::sin((1.0 - t) * kDegToRad) / sin1;
        g.at(i, (d + 1) % kPhaseBins) += A * std::sin(t * kDegToRad) / sin1;
    }
    g.validate(gain_max);
    return g;
}

EnergyImage target_energy(const ModalBasis& basis, Point target) {
    if (!basis.spec().strictly_contains(target))
        throw Error(ErrorKind::OutOfDomain, "target must lie strictly inside the plate");
    Field f = point_response_field(basis, target);
    // same arithmetic as phasor_energy_into with a single real unit phasor
    for (double& v : f.values()) v = std::sqrt(v * v) * kInvSqrt2;
    return EnergyImage{std::move(f), basis.fingerprint(), basis.drive_frequency()};
}

}  // namespace platefocus
