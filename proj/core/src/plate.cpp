#include "platefocus/plate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

#include "platefocus/errors.hpp"
#include "platefocus/hash.hpp"

namespace platefocus {

namespace {

constexpr double kPi = std::numbers::pi;

// sin(pi * p / q), q > 0, with exact zeros at integer p/q, exact
// antisymmetry under p -> p + q and exact mirror symmetry p -> q - p.
double sinpi_ratio(std::int64_t p, std::int64_t q) noexcept {
    const std::int64_t period = 2 * q;
    p %= period;
    if (p < 0) p += period;
    if (p >= q) return -sinpi_ratio(p - q, q);
    if (p == 0) return 0.0;
    if (2 * p > q) p = q - p;
    return std::sin(kPi * static_cast<double>(p) / static_cast<double>(q));
}

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

std::string canonical(const PlateSpec& s, const ActuatorLayout& l, double f, double t) {
    std::string out;
    char buf[64];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g;", v);
        out += buf;
    };
    put(s.a);
    put(s.b);
    put(s.h);
    put(s.youngs_modulus);
    put(s.poisson);
    put(s.density);
    put(s.grid_nx);
    put(s.grid_ny);
    for (const Point& p : l.positions) {
        put(p.x);
        put(p.y);
    }
    put(f);
    put(t);
    return out;
}

}  // namespace

double sin_turns(std::int64_t p, std::int64_t q) noexcept { return sinpi_ratio(2 * p, q); }

double PlateSpec::flexural_rigidity() const noexcept {
    return youngs_modulus * h * h * h / (12.0 * (1.0 - poisson * poisson));
}

double PlateSpec::pixel_x(int ix) const noexcept {
    return ix == grid_nx - 1 ? a : a * static_cast<double>(ix) / static_cast<double>(grid_nx - 1);
}

double PlateSpec::pixel_y(int iy) const noexcept {
    return iy == grid_ny - 1 ? b : b * static_cast<double>(iy) / static_cast<double>(grid_ny - 1);
}

PixelIndex PlateSpec::nearest_pixel(Point p) const noexcept {
    auto clampi = [](long v, int hi) { return static_cast<int>(v < 0 ? 0 : (v > hi ? hi : v)); };
    return {clampi(std::lround(p.x / a * (grid_nx - 1)), grid_nx - 1),
            clampi(std::lround(p.y / b * (grid_ny - 1)), grid_ny - 1)};
}

void PlateSpec::validate() const {
    if (!finite_positive(a) || !finite_positive(b) || !finite_positive(h))
        throw Error(ErrorKind::InvalidSpec, "plate dimensions must be finite and positive");
    if (!finite_positive(youngs_modulus) || !finite_positive(density))
        throw Error(ErrorKind::InvalidSpec, "Young's modulus and density must be finite and positive");
    if (!(poisson > 0.0 && poisson < 0.5))
        throw Error(ErrorKind::InvalidSpec, "Poisson ratio must lie in (0, 0.5)");
    if (grid_nx < 2 || grid_ny < 2) throw Error(ErrorKind::InvalidSpec, "grid needs at least 2 pixels per axis");
    if (!finite_positive(flexural_rigidity()))
        throw Error(ErrorKind::InvalidSpec, "flexural rigidity is not finite and positive");
}

double bending_wavelength(const PlateSpec& spec, double frequency) {
    spec.validate();
    if (!finite_positive(frequency)) throw Error(ErrorKind::InvalidSpec, "frequency must be positive");
    const double omega = 2.0 * kPi * frequency;
    return 2.0 * kPi * std::pow(spec.flexural_rigidity() / (spec.areal_density() * omega * omega), 0.25);
}

ActuatorLayout ActuatorLayout::quincunx(const PlateSpec& spec, double inset) {
    ActuatorLayout l;
    l.positions = {Point{inset, inset}, Point{spec.a - inset, inset}, Point{spec.a / 2, spec.b / 2},
                   Point{inset, spec.b - inset}, Point{spec.a - inset, spec.b - inset}};
    return l;
}

void ActuatorLayout::validate(const PlateSpec& spec) const {
    for (std::size_t i = 0; i < positions.size(); ++i) {
        if (!spec.strictly_contains(positions[i]))
            throw Error(ErrorKind::InvalidSpec, "actuator " + std::to_string(i + 1) + " is not strictly inside the plate");
    }
}

const char* to_string(WaveShape shape) noexcept {
    switch (shape) {
        case WaveShape::sine: return "sine";
        case WaveShape::triangle: return "triangle";
        case WaveShape::square: return "square";
        case WaveShape::ramp: return "ramp";
    }
    return "?";
}

WaveShape parse_wave_shape(const std::string& name) {
    if (name == "sine") return WaveShape::sine;
    if (name == "triangle") return WaveShape::triangle;
    if (name == "square") return WaveShape::square;
    if (name == "ramp") return WaveShape::ramp;
    throw Error(ErrorKind::UnsupportedWaveShape, "unknown wave shape '" + name + "'");
}

void DriveWave::validate() const {
    if (!finite_positive(frequency)) throw Error(ErrorKind::InvalidSpec, "drive frequency must be positive");
    if (!(amplitude >= 0.0) || !std::isfinite(amplitude))
        throw Error(ErrorKind::InvalidSpec, "drive amplitude must be finite and non-negative");
    if (phase_deg < 0 || phase_deg >= 360) throw Error(ErrorKind::InvalidSpec, "phase must be in [0, 360)");
    if (!(duty >= 0.0 && duty <= 1.0)) throw Error(ErrorKind::InvalidDuty, "duty must be in [0, 1]");
}

ModalBasis build_modal_basis(const PlateSpec& spec, const ActuatorLayout& layout, double frequency,
                             double truncation_multiple) {
    spec.validate();
    layout.validate(spec);
    if (!finite_positive(frequency)) throw Error(ErrorKind::InvalidSpec, "drive frequency must be positive");
    if (!(truncation_multiple >= 1.0) || !std::isfinite(truncation_multiple))
        throw Error(ErrorKind::InvalidSpec, "truncation multiple must be >= 1");

    ModalBasis basis;
    basis.spec_ = spec;
    basis.layout_ = layout;
    basis.drive_frequency_ = frequency;
    basis.truncation_multiple_ = truncation_multiple;

    const double D = spec.flexural_rigidity();
    const double rho_h = spec.areal_density();
    const double omega = 2.0 * kPi * frequency;
    const double wave_speed = std::sqrt(D / rho_h);
    const double f_max = truncation_multiple * frequency;
    const double norm = 2.0 / std::sqrt(spec.a * spec.b * rho_h);

    auto lambda_of = [&](int m, int n) {
        const double km = m * kPi / spec.a;
        const double kn = n * kPi / spec.b;
        return km * km + kn * kn;
    };
    auto natural_of = [&](double lambda) { return wave_speed * lambda / (2.0 * kPi); };

    for (int m = 1; natural_of(lambda_of(m, 1)) <= f_max; ++m) {
        for (int n = 1; natural_of(lambda_of(m, n)) <= f_max; ++n) {
            ModeEntry e;
            e.m = m;
            e.n = n;
            e.lambda = lambda_of(m, n);
            e.norm_scale = norm;
            e.natural_freq = natural_of(e.lambda);
            e.response_denominator = D * e.lambda * e.lambda - rho_h * omega * omega;
            if (std::abs(e.natural_freq - frequency) <= kResonanceGuardEpsilon * frequency) {
                char msg[160];
                std::snprintf(msg, sizeof msg, "mode (%d,%d) natural frequency %.6g Hz is within %.0e of drive %.6g Hz",
                              m, n, e.natural_freq, kResonanceGuardEpsilon, frequency);
                throw Error(ErrorKind::Resonance, msg);
            }
            basis.modes_.push_back(e);
            basis.max_m_ = std::max(basis.max_m_, m);
            basis.max_n_ = std::max(basis.max_n_, n);
        }
    }
    if (basis.modes_.empty())
        throw Error(ErrorKind::InvalidSpec, "truncation admits no modes; raise the truncation multiple");

    const std::size_t mode_count = basis.modes_.size();
    basis.actuator_coeffs_.resize(kActuatorCount * mode_count);
    for (std::size_t i = 0; i < kActuatorCount; ++i) {
        const Point p = layout.positions[i];
        for (std::size_t k = 0; k < mode_count; ++k) {
            const ModeEntry& e = basis.modes_[k];
            basis.actuator_coeffs_[i * mode_count + k] = eigenfunction(spec, e.m, e.n, p.x, p.y);
        }
    }

    const int nx = spec.grid_nx;
    const int ny = spec.grid_ny;
    basis.sin_x_.resize(static_cast<std::size_t>(basis.max_m_) * nx);
    basis.sin_y_.resize(static_cast<std::size_t>(basis.max_n_) * ny);
    for (int m = 1; m <= basis.max_m_; ++m)
        for (int ix = 0; ix < nx; ++ix)
            basis.sin_x_[static_cast<std::size_t>(m - 1) * nx + ix] = sin_turns(std::int64_t{m} * ix, 2 * (nx - 1));
    for (int n = 1; n <= basis.max_n_; ++n)
        for (int iy = 0; iy < ny; ++iy)
            basis.sin_y_[static_cast<std::size_t>(n - 1) * ny + iy] = sin_turns(std::int64_t{n} * iy, 2 * (ny - 1));

    basis.fingerprint_ = fnv1a64(canonical(spec, layout, frequency, truncation_multiple));
    return basis;
}

double ModalBasis::actuator_coefficient(std::size_t actuator, std::size_t mode_index) const {
    if (actuator >= kActuatorCount || mode_index >= modes_.size())
        throw Error(ErrorKind::OutOfDomain, "actuator or mode index out of range");
    return actuator_coeffs_[actuator * modes_.size() + mode_index];
}

Field ModalBasis::synthesize(const std::vector<double>& mode_weights) const {
    if (mode_weights.size() != modes_.size())
        throw Error(ErrorKind::DimensionMismatch, "one weight per mode is required");
    const int nx = spec_.grid_nx;
    const int ny = spec_.grid_ny;
    Field out(nx, ny, 0.0);
    std::vector<double> column_weight(static_cast<std::size_t>(ny));
    std::size_t k = 0;
    for (int m = 1; m <= max_m_; ++m) {
        std::fill(column_weight.begin(), column_weight.end(), 0.0);
        for (; k < modes_.size() && modes_[k].m == m; ++k) {
            const double w = mode_weights[k] * modes_[k].norm_scale;
            const double* sy = &sin_y_[static_cast<std::size_t>(modes_[k].n - 1) * ny];
            for (int iy = 0; iy < ny; ++iy) column_weight[iy] += w * sy[iy];
        }
        const double* sx = &sin_x_[static_cast<std::size_t>(m - 1) * nx];
        for (int iy = 0; iy < ny; ++iy) {
            const double g = column_weight[iy];
            double* row = &out(0, iy);
            for (int ix = 0; ix < nx; ++ix) row[ix] += sx[ix] * g;
        }
    }
    return out;
}

double eigenfunction(const PlateSpec& spec, int m, int n, double x, double y) {
    if (m < 1 || n < 1) throw Error(ErrorKind::InvalidSpec, "modal indices must be >= 1");
    if (!spec.contains({x, y})) throw Error(ErrorKind::OutOfDomain, "evaluation point outside the plate");
    const double norm = 2.0 / std::sqrt(spec.a * spec.b * spec.areal_density());
    return norm * std::sin(m * kPi * x / spec.a) * std::sin(n * kPi * y / spec.b);
}

double modal_response_amplitude(const ModalBasis& basis, std::size_t mode_index, std::size_t actuator,
                                double amplitude) {
    const double omega0 = basis.actuator_coefficient(actuator, mode_index);
    return omega0 * amplitude / basis.modes()[mode_index].response_denominator;
}

Field point_response_field(const ModalBasis& basis, Point source) {
    const PlateSpec& spec = basis.spec();
    if (!spec.contains(source)) throw Error(ErrorKind::OutOfDomain, "source point outside the plate");
    const auto& modes = basis.modes();
    std::vector<double> weights(modes.size());
    for (std::size_t k = 0; k < modes.size(); ++k)
        weights[k] = eigenfunction(spec, modes[k].m, modes[k].n, source.x, source.y) / modes[k].response_denominator;
    return basis.synthesize(weights);
}

Field actuator_response_field(const ModalBasis& basis, std::size_t actuator) {
    if (actuator >= kActuatorCount) throw Error(ErrorKind::OutOfDomain, "actuator index out of range");
    const auto& modes = basis.modes();
    std::vector<double> weights(modes.size());
    for (std::size_t k = 0; k < modes.size(); ++k)
        weights[k] = modal_response_amplitude(basis, k, actuator, 1.0);
    return basis.synthesize(weights);
}

PatternSeries single_actuator_pattern(const ModalBasis& basis, std::size_t actuator, const DriveWave& wave,
                                      int samples_per_period) {
    wave.validate();
    if (wave.shape != WaveShape::sine)
        throw Error(ErrorKind::UnsupportedWaveShape,
                    std::string("steady-state plate model needs a sine drive, got ") + to_string(wave.shape));
    if (std::abs(wave.frequency - basis.drive_frequency()) > 1e-9 * basis.drive_frequency())
        throw Error(ErrorKind::FrequencyMismatch, "wave frequency differs from the basis drive frequency");
    if (samples_per_period < 3) throw Error(ErrorKind::InvalidSpec, "need at least 3 samples per period");

    const Field unit = actuator_response_field(basis, actuator);
    const std::int64_t S = samples_per_period;
    PatternSeries series;
    series.frames.reserve(static_cast<std::size_t>(S));
    for (std::int64_t s = 0; s < S; ++s) {
        // phase of sample s in turns: s/S + phi/360
        const double scale = wave.amplitude * sin_turns(360 * s + std::int64_t{wave.phase_deg} * S, 360 * S);
        Field frame(unit.nx(), unit.ny());
        for (std::size_t p = 0; p < unit.size(); ++p) frame[p] = unit[p] * scale;
        series.frames.push_back(std::move(frame));
        series.sample_phases.push_back(2.0 * kPi * static_cast<double>(s) / static_cast<double>(S));
    }
    return series;
}

}  // namespace platefocus
