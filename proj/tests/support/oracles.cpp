#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace platefocus::oracle {

namespace {

Field scaled_to_max(const Field& f) {
    double peak = 0.0;
    for (double v : f.values()) peak = std::max(peak, v);
    Field out = f;
    if (peak > 0.0)
        for (double& v : out.values()) v /= peak;
    return out;
}

}  // namespace

double direct_ssim(const Field& a_in, const Field& b_in, int window, bool gaussian, double sigma, double c1,
                   double c2) {
    const Field a = scaled_to_max(a_in);
    const Field b = scaled_to_max(b_in);
    const int r = window / 2;
    std::vector<double> w(static_cast<std::size_t>(window * window));
    double wsum = 0.0;
    for (int v = 0; v < window; ++v)
        for (int u = 0; u < window; ++u) {
            const double du = u - r, dv = v - r;
            const double wt = gaussian ? std::exp(-(du * du + dv * dv) / (2.0 * sigma * sigma)) : 1.0;
            w[static_cast<std::size_t>(v * window + u)] = wt;
            wsum += wt;
        }
    for (double& x : w) x /= wsum;

    double total = 0.0;
    long count = 0;
    for (int y0 = 0; y0 + window <= a.ny(); ++y0) {
        for (int x0 = 0; x0 + window <= a.nx(); ++x0) {
            double ma = 0, mb = 0;
            for (int v = 0; v < window; ++v)
                for (int u = 0; u < window; ++u) {
                    const double wt = w[static_cast<std::size_t>(v * window + u)];
                    ma += wt * a(x0 + u, y0 + v);
                    mb += wt * b(x0 + u, y0 + v);
                }
            double va = 0, vb = 0, cov = 0;
            for (int v = 0; v < window; ++v)
                for (int u = 0; u < window; ++u) {
                    const double wt = w[static_cast<std::size_t>(v * window + u)];
                    const double da = a(x0 + u, y0 + v) - ma, db = b(x0 + u, y0 + v) - mb;
                    va += wt * da * da;
                    vb += wt * db * db;
                    cov += wt * da * db;
                }
            total += ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
            ++count;
        }
    }
    return total / static_cast<double>(count);
}

double modal_sum(const PlateSpec& spec, Point source, Point at, double frequency, double multiple) {
    const double pi = std::numbers::pi;
    const double rigidity = spec.youngs_modulus * std::pow(spec.h, 3) / (12.0 * (1.0 - spec.poisson * spec.poisson));
    const double mass = spec.density * spec.h;
    const double omega = 2.0 * pi * frequency;
    const double norm = 2.0 / std::sqrt(spec.a * spec.b * mass);
    const double lambda_max = multiple * omega / std::sqrt(rigidity / mass);
    double sum = 0.0;
    for (int m = 1;; ++m) {
        const double km = m * pi / spec.a;
        if (km * km > lambda_max) break;
        for (int n = 1;; ++n) {
            const double kn = n * pi / spec.b;
            const double lambda = km * km + kn * kn;
            if (lambda > lambda_max) break;
            const double phi_src = norm * std::sin(km * source.x) * std::sin(kn * source.y);
            const double phi_at = norm * std::sin(km * at.x) * std::sin(kn * at.y);
            sum += phi_src * phi_at / (rigidity * lambda * lambda - mass * omega * omega);
        }
    }
    return sum;
}

Field modal_sum_field(const PlateSpec& spec, Point source, double frequency, double multiple) {
    Field out(spec.grid_nx, spec.grid_ny);
    for (int iy = 0; iy < spec.grid_ny; ++iy)
        for (int ix = 0; ix < spec.grid_nx; ++ix) {
            const Point at{spec.a * ix / (spec.grid_nx - 1), spec.b * iy / (spec.grid_ny - 1)};
            out(ix, iy) = modal_sum(spec, source, at, frequency, multiple);
        }
    return out;
}

std::uint32_t crc32_bitwise(std::span<const std::uint8_t> bytes) {
    std::uint32_t crc = 0xFFFFFFFFu;
    for (std::uint8_t byte : bytes) {
        crc ^= byte;
        for (int k = 0; k < 8; ++k) crc = (crc & 1u) ? (crc >> 1) ^ 0xEDB88320u : crc >> 1;
    }
    return ~crc;
}

GainSpectrum random_gains(std::mt19937_64& rng, double gain_max) {
    std::uniform_real_distribution<double> dist(0.0, gain_max);
    GainSpectrum g;
    for (std::size_t i = 0; i < GainSpectrum::kEntries; ++i) g[i] = dist(rng);
    return g;
}

Field random_field(std::mt19937_64& rng, int nx, int ny) {
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    Field f(nx, ny);
    for (double& v : f.values()) v = dist(rng);
    return f;
}

double relative_max_diff(const Field& a, const Field& b) {
    double diff = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < a.values().size(); ++i) {
        diff = std::max(diff, std::abs(a[i] - b[i]));
        scale = std::max(scale, std::abs(b[i]));
    }
    return scale > 0.0 ? diff / scale : diff;
}

PlateSpec small_plate(int nx, int ny) {
    PlateSpec s;
    s.grid_nx = nx;
    s.grid_ny = ny;
    return s;
}

}  // namespace platefocus::oracle
