#pragma once

#include <iosfwd>
#include <string>

#include "platefocus/config.hpp"
#include "platefocus/decoupler.hpp"

namespace platefocus {

/// Decoupling result file ("platefocus-decouple", version 1): target,
/// best phasors and SSIM, the resolved config, and optionally the full gain
/// matrix. JSON, so the layout is self-describing.
struct StoredResult {
    DecoupleResult result;
    RunConfig config;
    bool has_gains = false;
    double initial_ssim = 0.0;
};

void write_result(std::ostream& os, const DecoupleResult& result, const RunConfig& config, bool include_gains = true);
void save_result(const std::string& path, const DecoupleResult& result, const RunConfig& config,
                 bool include_gains = true);
StoredResult read_result(std::istream& is);
StoredResult load_result(const std::string& path);

/// step,current_ssim,best_ssim
void save_trajectory_csv(const std::string& path, const DecoupleResult& result);

/// {"amplitude": [...5], "phase_deg": [...5]}
std::string phasors_to_json(const ActuatorPhasor& p);
ActuatorPhasor phasors_from_json(const std::string& text);

/// Writes `text` to `path`; throws Io on failure.
void save_text(const std::string& path, const std::string& text);
std::string load_text(const std::string& path);

}  // namespace platefocus
