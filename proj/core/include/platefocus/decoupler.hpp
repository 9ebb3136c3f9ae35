#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "platefocus/pattern.hpp"
#include "platefocus/plate.hpp"
#include "platefocus/rng.hpp"
#include "platefocus/ssim.hpp"

namespace platefocus {

/// How a candidate that does not improve SSIM is treated.
///  - prose:   improvements always kept; regressions kept iff u < 1 - current.
///  - literal: the printed loop condition, kept for comparison runs: accept
///             iff candidate < current or (1 - current) < u.
enum class AcceptRule { prose, literal };

const char* to_string(AcceptRule rule) noexcept;
AcceptRule parse_accept_rule(const std::string& name);

struct AnnealConfig {
    int iterations = 10000;
    int perturb_count = 8;
    double perturb_scale = 0.5;
    std::uint64_t seed = 1;
    double gain_max = kGainMax;
    AcceptRule accept_rule = AcceptRule::prose;
    /// Search the ten (A_i, phi_i) numbers directly instead of the 5x360 matrix.
    bool compact = false;
    /// Max phase step per move in compact mode.
    double compact_phase_step_deg = 5.0;

    void validate() const;
};

using AnnealRng = Rng;

bool accept(double ssim_candidate, double ssim_current, double u, AcceptRule rule) noexcept;

/// Changes exactly cfg.perturb_count distinct, uniformly chosen entries by a
/// nonzero uniform offset in [-scale, scale], clamped to [0, gain_max].
/// perturb_scale == 0 returns the input unchanged.
GainSpectrum perturb(const GainSpectrum& gains, const AnnealConfig& cfg, AnnealRng& rng);

GainSpectrum random_gains(AnnealRng& rng, double gain_max = kGainMax);

struct TrajectoryPoint {
    int step = 0;
    double current_ssim = 0.0;
    double best_ssim = 0.0;
};

struct DecoupleResult {
    Point target;
    GainSpectrum best_gains;
    ActuatorPhasor best_phasors;
    double best_ssim = 0.0;
    std::vector<TrajectoryPoint> trajectory;
};

/// Objective evaluation shared by the annealer and by after-the-fact checks.
class DecoupleObjective {
public:
    DecoupleObjective(const ResponseCache& cache, const EnergyImage& target, const SsimParams& params);

    double score(const GainSpectrum& gains);
    double score(const std::array<std::complex<double>, kActuatorCount>& z);

    const Field& last_energy() const noexcept { return energy_; }

private:
    const ResponseCache& cache_;
    SsimReference reference_;
    Field energy_;
};

/// Simulated-annealing search for the gain spectrum whose energy image is
/// most similar to a single point source at `target`. Bit-reproducible for a
/// fixed seed.
DecoupleResult anneal(const ModalBasis& basis, const ResponseCache& cache, Point target, const SsimParams& metric,
                      const AnnealConfig& cfg);
DecoupleResult anneal(const ModalBasis& basis, Point target, const SsimParams& metric, const AnnealConfig& cfg);

}  // namespace platefocus
