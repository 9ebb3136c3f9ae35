#pragma once

#include <string>
#include <vector>

#include "platefocus/grid.hpp"
#include "platefocus/pattern.hpp"

namespace platefocus {

enum class WindowKind { uniform, gaussian };

const char* to_string(WindowKind kind) noexcept;
WindowKind parse_window_kind(const std::string& name);

/// Windowed SSIM settings. The stabilizers are c1 = (k1 L)^2, c2 = (k2 L)^2.
struct SsimParams {
    int window = 11;
    WindowKind kind = WindowKind::gaussian;
    double sigma = 1.5;
    double k1 = 0.01;
    double k2 = 0.03;
    double dynamic_range = 1.0;

    double c1() const noexcept { return (k1 * dynamic_range) * (k1 * dynamic_range); }
    double c2() const noexcept { return (k2 * dynamic_range) * (k2 * dynamic_range); }

    /// Normalized 1-D window taps; the 2-D window is their outer product.
    std::vector<double> taps() const;

    void validate() const;
};

/// Precomputed statistics of a reference image so repeated comparisons
/// against it (one per annealing step) only filter the candidate.
///
/// Both images are divided by their own maximum before comparison (an
/// all-zero image stays zero), then SSIM is averaged over every window that
/// fits entirely inside the image.
class SsimReference {
public:
    SsimReference(const Field& reference, const SsimParams& params);

    double score(const Field& candidate) const;

    const SsimParams& params() const noexcept { return params_; }

private:
    struct Moments {
        Field mean;
        Field second;  // filtered x^2
    };

    SsimParams params_;
    std::vector<double> taps_;
    int nx_ = 0;
    int ny_ = 0;
    Field normalized_;
    Moments moments_;

};

/// Mean local SSIM; symmetric in its arguments. Two all-zero images score 1.
double ssim(const Field& a, const Field& b, const SsimParams& params = {});
double ssim(const EnergyImage& a, const EnergyImage& b, const SsimParams& params = {});

/// Copy of `f` scaled so its maximum is 1 (zeros stay zero).
Field normalize_by_max(const Field& f);

}  // namespace platefocus
