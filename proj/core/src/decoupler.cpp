#include "platefocus/decoupler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "platefocus/errors.hpp"

namespace platefocus {

const char* to_string(AcceptRule rule) noexcept { return rule == AcceptRule::prose ? "prose" : "literal"; }

AcceptRule parse_accept_rule(const std::string& name) {
    if (name == "prose") return AcceptRule::prose;
    if (name == "literal") return AcceptRule::literal;
    throw Error(ErrorKind::Config, "unknown accept rule '" + name + "'");
}

void AnnealConfig::validate() const {
    if (iterations < 1) throw Error(ErrorKind::Config, "iterations must be >= 1");
    if (perturb_count < 1 || perturb_count > static_cast<int>(GainSpectrum::kEntries))
        throw Error(ErrorKind::Config, "perturb_count must be in [1, 1800]");
    if (!(gain_max > 0.0) || !std::isfinite(gain_max)) throw Error(ErrorKind::Config, "gain_max must be positive");
    if (!(perturb_scale > 0.0 && perturb_scale <= gain_max))
        throw Error(ErrorKind::Config, "perturb_scale must be in (0, gain_max]");
    if (compact && !(compact_phase_step_deg > 0.0 && compact_phase_step_deg <= 180.0))
        throw Error(ErrorKind::Config, "compact phase step must be in (0, 180]");
}

bool accept(double ssim_candidate, double ssim_current, double u, AcceptRule rule) noexcept {
    if (rule == AcceptRule::literal) return ssim_candidate < ssim_current || (1.0 - ssim_current) < u;
    if (ssim_candidate > ssim_current) return true;
    return u < 1.0 - ssim_current;
}

GainSpectrum perturb(const GainSpectrum& gains, const AnnealConfig& cfg, AnnealRng& rng) {
    GainSpectrum out = gains;
    if (cfg.perturb_scale == 0.0) return out;
    const std::size_t count = static_cast<std::size_t>(std::clamp<int>(cfg.perturb_count, 1, GainSpectrum::kEntries));

    // partial Fisher-Yates over the flat index space
    std::array<std::uint16_t, GainSpectrum::kEntries> order;
    for (std::size_t f = 0; f < order.size(); ++f) order[f] = static_cast<std::uint16_t>(f);
    for (std::size_t c = 0; c < count; ++c) {
        const std::size_t pick = c + rng.below(order.size() - c);
        std::swap(order[c], order[pick]);
        const std::size_t flat = order[c];
        const double before = out[flat];
        double after = before;
        // redraw in the measure-zero cases where the entry would not move
        for (int tries = 0; tries < 64 && after == before; ++tries) {
            double delta = 0.0;
            while (delta == 0.0) delta = rng.uniform(-cfg.perturb_scale, cfg.perturb_scale);
            after = std::clamp(before + delta, 0.0, cfg.gain_max);
        }
        out[flat] = after;
    }
    return out;
}

GainSpectrum random_gains(AnnealRng& rng, double gain_max) {
    GainSpectrum g;
    for (std::size_t f = 0; f < GainSpectrum::kEntries; ++f) g[f] = rng.uniform(0.0, gain_max);
    return g;
}

DecoupleObjective::DecoupleObjective(const ResponseCache& cache, const EnergyImage& target, const SsimParams& params)
    : cache_(cache), reference_(target.values, params), energy_(cache.nx(), cache.ny()) {
    if (target.values.nx() != cache.nx() || target.values.ny() != cache.ny())
        throw Error(ErrorKind::DimensionMismatch, "target image does not match the response grid");
}

double DecoupleObjective::score(const std::array<std::complex<double>, kActuatorCount>& z) {
    phasor_energy_into(cache_, z, energy_);
    return reference_.score(energy_);
}

double DecoupleObjective::score(const GainSpectrum& gains) { return score(collapse_complex(gains)); }

namespace {

DecoupleResult anneal_full(DecoupleObjective& objective, Point target, const AnnealConfig& cfg) {
    AnnealRng rng(cfg.seed);
    DecoupleResult result;
    result.target = target;
    result.trajectory.reserve(static_cast<std::size_t>(cfg.iterations) + 1);

    GainSpectrum current = random_gains(rng, cfg.gain_max);
    double current_ssim = objective.score(current);
    result.best_gains = current;
    result.best_ssim = current_ssim;
    result.trajectory.push_back({0, current_ssim, current_ssim});

    for (int step = 1; step <= cfg.iterations; ++step) {
        GainSpectrum candidate = perturb(current, cfg, rng);
        const double candidate_ssim = objective.score(candidate);
        const double u = rng.uniform01();
        if (accept(candidate_ssim, current_ssim, u, cfg.accept_rule)) {
            current = candidate;
            current_ssim = candidate_ssim;
        }
        if (current_ssim > result.best_ssim) {
            result.best_ssim = current_ssim;
            result.best_gains = current;
        }
        result.trajectory.push_back({step, current_ssim, result.best_ssim});
    }
    result.best_phasors = collapse_gains(result.best_gains);
    return result;
}

DecoupleResult anneal_compact(DecoupleObjective& objective, Point target, const AnnealConfig& cfg) {
    AnnealRng rng(cfg.seed);
    DecoupleResult result;
    result.target = target;
    result.trajectory.reserve(static_cast<std::size_t>(cfg.iterations) + 1);

    ActuatorPhasor current;
    for (std::size_t i = 0; i < kActuatorCount; ++i) {
        current.amplitude[i] = rng.uniform(0.0, cfg.gain_max);
        current.phase_deg[i] = rng.uniform(0.0, 360.0);
    }
    // Scored through the expanded gain matrix so the reported best_ssim is
    // exactly what a from-scratch evaluation of best_gains gives.
    GainSpectrum current_gains = expand_phasors(current, cfg.gain_max);
    double current_ssim = objective.score(current_gains);
    result.best_gains = current_gains;
    result.best_ssim = current_ssim;
    result.trajectory.push_back({0, current_ssim, current_ssim});

    const int moves = std::min<int>(cfg.perturb_count, static_cast<int>(kActuatorCount));
    for (int step = 1; step <= cfg.iterations; ++step) {
        ActuatorPhasor candidate = current;
        for (int c = 0; c < moves; ++c) {
            const std::size_t i = rng.below(kActuatorCount);
            candidate.amplitude[i] =
                std::clamp(candidate.amplitude[i] + rng.uniform(-cfg.perturb_scale, cfg.perturb_scale), 0.0, cfg.gain_max);
            double phi = candidate.phase_deg[i] + rng.uniform(-cfg.compact_phase_step_deg, cfg.compact_phase_step_deg);
            phi = std::fmod(phi, 360.0);
            if (phi < 0) phi += 360.0;
            candidate.phase_deg[i] = phi >= 360.0 ? 0.0 : phi;
        }
        GainSpectrum candidate_gains = expand_phasors(candidate, cfg.gain_max);
        const double candidate_ssim = objective.score(candidate_gains);
        const double u = rng.uniform01();
        if (accept(candidate_ssim, current_ssim, u, cfg.accept_rule)) {
            current = candidate;
            current_gains = candidate_gains;
            current_ssim = candidate_ssim;
        }
        if (current_ssim > result.best_ssim) {
            result.best_ssim = current_ssim;
            result.best_gains = current_gains;
        }
        result.trajectory.push_back({step, current_ssim, result.best_ssim});
    }
    result.best_phasors = collapse_gains(result.best_gains);
    return result;
}

}  // namespace

DecoupleResult anneal(const ModalBasis& basis, const ResponseCache& cache, Point target, const SsimParams& metric,
                      const AnnealConfig& cfg) {
    cfg.validate();
    metric.validate();
    if (cache.spec_hash() != basis.fingerprint())
        throw Error(ErrorKind::Config, "response cache was built from a different basis");
    const EnergyImage target_image = target_energy(basis, target);
    DecoupleObjective objective(cache, target_image, metric);
    return cfg.compact ? anneal_compact(objective, target, cfg) : anneal_full(objective, target, cfg);
}

DecoupleResult anneal(const ModalBasis& basis, Point target, const SsimParams& metric, const AnnealConfig& cfg) {
    const ResponseCache cache(basis);
    return anneal(basis, cache, target, metric, cfg);
}

}  // namespace platefocus
