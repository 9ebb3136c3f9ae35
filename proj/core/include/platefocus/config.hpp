#pragma once

#include <cstdint>
#include <string>

#include "platefocus/decoupler.hpp"
#include "platefocus/plate.hpp"
#include "platefocus/ssim.hpp"
#include "platefocus/udp_link.hpp"

namespace platefocus {

inline constexpr const char* kConfigEnvVar = "PLATEFOCUS_CONFIG";

/// Desk-scale overrides applied by --fast.
inline constexpr int kFastGridNx = 90;
inline constexpr int kFastGridNy = 184;
inline constexpr int kFastIterations = 2000;

struct LinkConfig {
    Endpoint endpoint;
    double duration_s = 1.0;
    double loss_rate = 0.0;
    double receive_timeout_s = 5.0;
    bool realtime = true;
};

/// Fully resolved run configuration. The JSON form uses millimeters for all
/// lengths; every key is optional and unknown keys are rejected.
///
/// {
///   "plate":    {"width_mm", "length_mm", "thickness_mm", "youngs_modulus_pa",
///                "poisson", "density_kg_m3", "grid_nx", "grid_ny"},
///   "actuators":{"positions_mm": [[x, y] x5]} or {"inset_mm": 15},
///   "drive":    {"frequency_hz", "truncation_multiple", "samples_per_period"},
///   "ssim":     {"window", "kind", "sigma", "k1", "k2", "dynamic_range"},
///   "anneal":   {"iterations", "perturb_count", "perturb_scale", "seed",
///                "gain_max", "accept_rule", "compact", "compact_phase_step_deg"},
///   "link":     {"host", "port", "duration_s", "loss_rate", "receive_timeout_s", "realtime"}
/// }
struct RunConfig {
    PlateSpec plate;
    ActuatorLayout layout = ActuatorLayout::quincunx(PlateSpec{});
    double drive_frequency = kDefaultDriveFrequency;
    double truncation_multiple = kDefaultTruncationMultiple;
    int samples_per_period = kDefaultSamplesPerPeriod;
    SsimParams ssim;
    AnnealConfig anneal;
    LinkConfig link;

    void apply_fast();
    void validate() const;

    /// Pretty-printed, key-sorted JSON; byte-stable for equal configs.
    std::string to_json() const;
    static RunConfig from_json(const std::string& text);
    static RunConfig load(const std::string& path);

    /// Digest of everything that shapes decoupling output (plate, layout,
    /// drive, SSIM, annealing); the link section is excluded.
    std::uint64_t fingerprint() const;

    ModalBasis build_basis() const;
};

std::string fingerprint_hex(std::uint64_t fp);

}  // namespace platefocus
