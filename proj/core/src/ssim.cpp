#include "platefocus/ssim.hpp"

#include <algorithm>
#include <cmath>

#include "platefocus/errors.hpp"

namespace platefocus {

const char* to_string(WindowKind kind) noexcept { return kind == WindowKind::uniform ? "uniform" : "gaussian"; }

WindowKind parse_window_kind(const std::string& name) {
    if (name == "uniform") return WindowKind::uniform;
    if (name == "gaussian") return WindowKind::gaussian;
    throw Error(ErrorKind::Config, "unknown SSIM window kind '" + name + "'");
}

void SsimParams::validate() const {
    if (window < 3 || window % 2 == 0) throw Error(ErrorKind::Config, "SSIM window must be odd and >= 3");
    if (kind == WindowKind::gaussian && !(sigma > 0.0)) throw Error(ErrorKind::Config, "SSIM sigma must be positive");
    if (!(k1 > 0.0) || !(k2 > 0.0) || !(dynamic_range > 0.0))
        throw Error(ErrorKind::Config, "SSIM constants must be positive");
}

std::vector<double> SsimParams::taps() const {
    validate();
    std::vector<double> t(static_cast<std::size_t>(window));
    const int r = window / 2;
    double sum = 0.0;
    for (int i = -r; i <= r; ++i) {
        const double w = kind == WindowKind::uniform ? 1.0 : std::exp(-0.5 * (i * i) / (sigma * sigma));
        t[static_cast<std::size_t>(i + r)] = w;
        sum += w;
    }
    for (double& w : t) w /= sum;
    return t;
}

Field normalize_by_max(const Field& f) {
    double m = 0.0;
    for (double v : f.values()) m = std::max(m, v);
    Field out = f;
    if (m > 0.0) {
        const double inv = 1.0 / m;
        for (double& v : out.values()) v *= inv;
    } else {
        for (double& v : out.values()) v = 0.0;
    }
    return out;
}

namespace {

// Separable window filter keeping only fully-contained windows: the output is
// (nx - w + 1) x (ny - w + 1).
Field filter_valid(const Field& src, const std::vector<double>& taps) {
    const int w = static_cast<int>(taps.size());
    const int ox = src.nx() - w + 1;
    const int oy = src.ny() - w + 1;
    Field horizontal(ox, src.ny());
    for (int iy = 0; iy < src.ny(); ++iy) {
        const double* row = &src(0, iy);
        double* out = &horizontal(0, iy);
        for (int ix = 0; ix < ox; ++ix) {
            double acc = 0.0;
            for (int t = 0; t < w; ++t) acc += taps[t] * row[ix + t];
            out[ix] = acc;
        }
    }
    Field result(ox, oy, 0.0);
    for (int iy = 0; iy < oy; ++iy) {
        double* out = &result(0, iy);
        for (int t = 0; t < w; ++t) {
            const double tap = taps[t];
            const double* in = &horizontal(0, iy + t);
            for (int ix = 0; ix < ox; ++ix) out[ix] += tap * in[ix];
        }
    }
    return result;
}

Field squared(const Field& f) {
    Field out = f;
    for (double& v : out.values()) v *= v;
    return out;
}

Field product(const Field& a, const Field& b) {
    Field out = a;
    for (std::size_t p = 0; p < out.size(); ++p) out[p] = a[p] * b[p];
    return out;
}

}  // namespace

SsimReference::SsimReference(const Field& reference, const SsimParams& params)
    : params_(params), taps_(params.taps()), nx_(reference.nx()), ny_(reference.ny()) {
    if (nx_ < params_.window || ny_ < params_.window)
        throw Error(ErrorKind::DimensionMismatch, "image is smaller than the SSIM window");
    normalized_ = normalize_by_max(reference);
    moments_.mean = filter_valid(normalized_, taps_);
    moments_.second = filter_valid(squared(normalized_), taps_);
}

double SsimReference::score(const Field& candidate) const {
    if (candidate.nx() != nx_ || candidate.ny() != ny_)
        throw Error(ErrorKind::DimensionMismatch, "SSIM images differ in shape");
    const Field x = normalize_by_max(candidate);
    const Field mu_x = filter_valid(x, taps_);
    const Field xx = filter_valid(squared(x), taps_);
    const Field xy = filter_valid(product(x, normalized_), taps_);
    const Field& mu_y = moments_.mean;
    const Field& yy = moments_.second;

    const double c1 = params_.c1();
    const double c2 = params_.c2();
    double total = 0.0;
    for (std::size_t p = 0; p < mu_x.size(); ++p) {
        const double mx = mu_x[p];
        const double my = mu_y[p];
        const double mxy = mx * my;
        const double var_x = xx[p] - mx * mx;
        const double var_y = yy[p] - my * my;
        const double cov = xy[p] - mxy;
        total += ((2.0 * mxy + c1) * (2.0 * cov + c2)) / ((mx * mx + my * my + c1) * (var_x + var_y + c2));
    }
    return total / static_cast<double>(mu_x.size());
}

double ssim(const Field& a, const Field& b, const SsimParams& params) {
    if (!a.same_shape(b)) throw Error(ErrorKind::DimensionMismatch, "SSIM images differ in shape");
    return SsimReference(b, params).score(a);
}

double ssim(const EnergyImage& a, const EnergyImage& b, const SsimParams& params) {
    return ssim(a.values, b.values, params);
}

}  // namespace platefocus
