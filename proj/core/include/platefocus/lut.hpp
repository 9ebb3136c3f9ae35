#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "platefocus/decoupler.hpp"

namespace platefocus {

inline constexpr const char* kLutMagic = "VFLUT1";

/// One precomputed focus target. Coordinates are kept in millimeters, the
/// unit used on the CLI and in the file.
struct LutEntry {
    double x_mm = 0.0;
    double y_mm = 0.0;
    ActuatorPhasor phasors;
    double ssim = 0.0;
};

struct LutHit {
    std::size_t index = 0;
    LutEntry entry;
    double distance_mm = 0.0;
};

/// Look-up table from contact point to per-actuator drive.
///
/// Text format, one record per line:
///   VFLUT1
///   fingerprint <16 hex digits>
///   # x_mm y_mm A1 phi1_deg ... A5 phi5_deg ssim
///   <13 whitespace-separated numbers>
class Lut {
public:
    Lut() = default;
    Lut(std::uint64_t fingerprint, std::vector<LutEntry> entries)
        : fingerprint_(fingerprint), entries_(std::move(entries)) {}

    std::uint64_t fingerprint() const noexcept { return fingerprint_; }
    const std::vector<LutEntry>& entries() const noexcept { return entries_; }

    /// Nearest stored target (Euclidean, mm); ties go to the earlier entry.
    LutHit nearest(double x_mm, double y_mm) const;

    /// Throws FingerprintMismatch when the table was built under another config.
    void check_fingerprint(std::uint64_t expected) const;

    void write(std::ostream& os) const;
    static Lut read(std::istream& is);

    void save(const std::string& path) const;
    static Lut load(const std::string& path);

private:
    std::uint64_t fingerprint_ = 0;
    std::vector<LutEntry> entries_;
};

/// Regular grid of targets, inclusive of both ends on each axis.
struct TargetGrid {
    double x0_mm = 0.0, x1_mm = 0.0;
    int nx = 1;
    double y0_mm = 0.0, y1_mm = 0.0;
    int ny = 1;

    std::vector<Point> points_m() const;
    /// Parses "x0:x1:nx,y0:y1:ny" (mm).
    static TargetGrid parse(const std::string& text);
};

/// Runs one anneal per target with seed = cfg.seed + index; entries are
/// independent and computed on up to `threads` workers (0 = hardware).
Lut build_lut(const ModalBasis& basis, const std::vector<Point>& targets, const SsimParams& metric,
              const AnnealConfig& cfg, std::uint64_t fingerprint, unsigned threads = 0);

}  // namespace platefocus
