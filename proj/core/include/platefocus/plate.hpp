#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "platefocus/grid.hpp"

namespace platefocus {

inline constexpr std::size_t kActuatorCount = 5;
/// Zero-based index of the central actuator ("actuator 3" on the board).
inline constexpr std::size_t kCentralActuator = 2;

inline constexpr double kDefaultDriveFrequency = 160.0;
inline constexpr double kDefaultTruncationMultiple = 2000.0;
inline constexpr int kDefaultSamplesPerPeriod = 64;
inline constexpr double kResonanceGuardEpsilon = 1e-3;

struct Point {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const Point&, const Point&) = default;
};

/// Geometry and material of the simply-supported plate. Lengths in meters.
/// Material defaults are PMMA; the thickness is chosen so the bending
/// wavelength at 160 Hz comes out near 187 mm.
struct PlateSpec {
    double a = 71.5e-3;
    double b = 146.7e-3;
    double h = 1.75e-3;
    double youngs_modulus = 3.2e9;
    double poisson = 0.35;
    double density = 1190.0;
    int grid_nx = 179;
    int grid_ny = 367;

    double flexural_rigidity() const noexcept;
    double areal_density() const noexcept { return density * h; }

    double pixel_x(int ix) const noexcept;
    double pixel_y(int iy) const noexcept;
    PixelIndex nearest_pixel(Point p) const noexcept;
    /// Grid pitch along x (meters per pixel).
    double pitch_x() const noexcept { return a / (grid_nx - 1); }
    double pitch_y() const noexcept { return b / (grid_ny - 1); }

    bool contains(Point p) const noexcept { return p.x >= 0 && p.x <= a && p.y >= 0 && p.y <= b; }
    bool strictly_contains(Point p) const noexcept { return p.x > 0 && p.x < a && p.y > 0 && p.y < b; }

    /// Throws Error(InvalidSpec) on any violated invariant.
    void validate() const;

    friend bool operator==(const PlateSpec&, const PlateSpec&) = default;
};

/// Bending wavelength 2*pi*(D / (rho*h*omega^2))^(1/4) of a free Kirchhoff plate.
double bending_wavelength(const PlateSpec& spec, double frequency);

struct ActuatorLayout {
    std::array<Point, kActuatorCount> positions{};

    /// Actuator 3 at the plate center, the others inset from the corners
    /// (1: low-x/low-y, 2: high-x/low-y, 4: low-x/high-y, 5: high-x/high-y).
    static ActuatorLayout quincunx(const PlateSpec& spec, double inset = 15e-3);

    void validate(const PlateSpec& spec) const;

    friend bool operator==(const ActuatorLayout&, const ActuatorLayout&) = default;
};

enum class WaveShape { sine, triangle, square, ramp };

const char* to_string(WaveShape shape) noexcept;
WaveShape parse_wave_shape(const std::string& name);

struct DriveWave {
    WaveShape shape = WaveShape::sine;
    double frequency = kDefaultDriveFrequency;
    double amplitude = 1.0;
    int phase_deg = 0;
    double duty = 0.5;

    void validate() const;
};

struct ModeEntry {
    int m = 0;
    int n = 0;
    double lambda = 0.0;
    double norm_scale = 0.0;
    double natural_freq = 0.0;
    double response_denominator = 0.0;
};

/// Truncated modal basis of the driven plate at one drive frequency.
///
/// Mode shapes are separable, so instead of storing every eigenfunction on
/// the full pixel grid the basis keeps sin(m*pi*x/a) per grid column and
/// sin(n*pi*y/b) per grid row; phi_mn(ix, iy) = norm_scale * sx(m, ix) * sy(n, iy).
class ModalBasis {
public:
    const PlateSpec& spec() const noexcept { return spec_; }
    const ActuatorLayout& layout() const noexcept { return layout_; }
    double drive_frequency() const noexcept { return drive_frequency_; }
    double truncation_multiple() const noexcept { return truncation_multiple_; }

    /// Sorted by (m, n).
    const std::vector<ModeEntry>& modes() const noexcept { return modes_; }
    std::size_t mode_count() const noexcept { return modes_.size(); }
    int max_m() const noexcept { return max_m_; }
    int max_n() const noexcept { return max_n_; }

    /// phi_mn evaluated at actuator i (the point-load force coefficient).
    double actuator_coefficient(std::size_t actuator, std::size_t mode_index) const;

    double grid_sin_x(int m, int ix) const noexcept {
        return sin_x_[static_cast<std::size_t>(m - 1) * static_cast<std::size_t>(spec_.grid_nx) +
                      static_cast<std::size_t>(ix)];
    }
    double grid_sin_y(int n, int iy) const noexcept {
        return sin_y_[static_cast<std::size_t>(n - 1) * static_cast<std::size_t>(spec_.grid_ny) +
                      static_cast<std::size_t>(iy)];
    }

    /// Sum_modes weight[k] * phi_k(x, y) on the pixel grid. The accumulation
    /// order is fixed (m-major, n-minor), so results do not depend on threading.
    Field synthesize(const std::vector<double>& mode_weights) const;

    /// Stable 64-bit digest of spec, layout, frequency and truncation.
    std::uint64_t fingerprint() const noexcept { return fingerprint_; }

private:
    friend ModalBasis build_modal_basis(const PlateSpec&, const ActuatorLayout&, double, double);

    PlateSpec spec_;
    ActuatorLayout layout_;
    double drive_frequency_ = 0.0;
    double truncation_multiple_ = 0.0;
    std::vector<ModeEntry> modes_;
    std::vector<double> actuator_coeffs_;  // [actuator][mode]
    std::vector<double> sin_x_;            // [m-1][ix]
    std::vector<double> sin_y_;            // [n-1][iy]
    int max_m_ = 0;
    int max_n_ = 0;
    std::uint64_t fingerprint_ = 0;
};

/// Throws InvalidSpec for bad inputs and Resonance when an included mode's
/// modal response denominator is within kResonanceGuardEpsilon (relative) of zero.
ModalBasis build_modal_basis(const PlateSpec& spec, const ActuatorLayout& layout, double frequency,
                             double truncation_multiple = kDefaultTruncationMultiple);

/// Normalized simply-supported eigenfunction (2/sqrt(a b rho h)) sin(m pi x/a) sin(n pi y/b).
double eigenfunction(const PlateSpec& spec, int m, int n, double x, double y);

/// Steady-state modal amplitude phi_mn(x0_i, y0_i) * A / (D lambda^2 - rho h (2 pi f)^2).
double modal_response_amplitude(const ModalBasis& basis, std::size_t mode_index, std::size_t actuator,
                                double amplitude);

/// Unit-amplitude, zero-phase displacement amplitude field of a point load at
/// `source`; the time response is field * A * sin(2 pi f t + phi).
Field point_response_field(const ModalBasis& basis, Point source);
Field actuator_response_field(const ModalBasis& basis, std::size_t actuator);

struct PatternSeries {
    std::vector<Field> frames;
    /// Sample phases in radians, s * 2pi / S.
    std::vector<double> sample_phases;

    std::size_t sample_count() const noexcept { return frames.size(); }
};

/// sin(2 pi * turns) for turns = p / q with exact zeros at multiples of 1/2 and
/// exact antisymmetry under a half-turn shift.
double sin_turns(std::int64_t p, std::int64_t q) noexcept;

/// Time frames of a single actuator's vibration over one drive period.
PatternSeries single_actuator_pattern(const ModalBasis& basis, std::size_t actuator, const DriveWave& wave,
                                      int samples_per_period = kDefaultSamplesPerPeriod);

}  // namespace platefocus
