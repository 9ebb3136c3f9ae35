#include "platefocus/lut.hpp"

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include "platefocus/errors.hpp"

namespace platefocus {

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

LutHit Lut::nearest(double x_mm, double y_mm) const {
    if (entries_.empty()) throw Error(ErrorKind::Config, "look-up table is empty");
    LutHit hit;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const double d = std::hypot(entries_[i].x_mm - x_mm, entries_[i].y_mm - y_mm);
        if (d < best) {
            best = d;
            hit.index = i;
        }
    }
    hit.entry = entries_[hit.index];
    hit.distance_mm = best;
    return hit;
}

void Lut::check_fingerprint(std::uint64_t expected) const {
    if (expected != fingerprint_) {
        char msg[128];
        std::snprintf(msg, sizeof msg, "table fingerprint %016" PRIx64 " does not match configuration %016" PRIx64,
                      fingerprint_, expected);
        throw Error(ErrorKind::FingerprintMismatch, msg);
    }
}

void Lut::write(std::ostream& os) const {
    char fp[32];
    std::snprintf(fp, sizeof fp, "%016" PRIx64, fingerprint_);
    os << kLutMagic << '\n' << "fingerprint " << fp << '\n';
    os << "# x_mm y_mm A1 phi1_deg A2 phi2_deg A3 phi3_deg A4 phi4_deg A5 phi5_deg ssim\n";
    for (const LutEntry& e : entries_) {
        os << fmt17(e.x_mm) << ' ' << fmt17(e.y_mm);
        for (std::size_t i = 0; i < kActuatorCount; ++i)
            os << ' ' << fmt17(e.phasors.amplitude[i]) << ' ' << fmt17(e.phasors.phase_deg[i]);
        os << ' ' << fmt17(e.ssim) << '\n';
    }
}

Lut Lut::read(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != kLutMagic) throw Error(ErrorKind::BadMagic, "not a VFLUT1 table");
    if (!std::getline(is, line) || line.rfind("fingerprint ", 0) != 0)
        throw Error(ErrorKind::Truncated, "missing fingerprint line");
    std::uint64_t fp = 0;
    try {
        fp = std::stoull(line.substr(12), nullptr, 16);
    } catch (const std::exception&) {
        throw Error(ErrorKind::Config, "malformed fingerprint line");
    }
    std::vector<LutEntry> entries;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream row(line);
        LutEntry e;
        row >> e.x_mm >> e.y_mm;
        for (std::size_t i = 0; i < kActuatorCount; ++i) row >> e.phasors.amplitude[i] >> e.phasors.phase_deg[i];
        row >> e.ssim;
        if (!row) throw Error(ErrorKind::Truncated, "malformed table row: " + line);
        entries.push_back(e);
    }
    return Lut(fp, std::move(entries));
}

void Lut::save(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error(ErrorKind::Io, "cannot open " + path + " for writing");
    write(os);
    if (!os) throw Error(ErrorKind::Io, "failed writing " + path);
}

Lut Lut::load(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error(ErrorKind::Io, "cannot open " + path);
    return read(is);
}

std::vector<Point> TargetGrid::points_m() const {
    if (nx < 1 || ny < 1) throw Error(ErrorKind::Config, "target grid needs at least one point per axis");
    std::vector<Point> pts;
    for (int j = 0; j < ny; ++j) {
        const double y = ny == 1 ? y0_mm : y0_mm + (y1_mm - y0_mm) * j / (ny - 1);
        for (int i = 0; i < nx; ++i) {
            const double x = nx == 1 ? x0_mm : x0_mm + (x1_mm - x0_mm) * i / (nx - 1);
            pts.push_back({x * 1e-3, y * 1e-3});
        }
    }
    return pts;
}

TargetGrid TargetGrid::parse(const std::string& text) {
    TargetGrid g;
    char c1, c2, comma, c3, c4;
    std::istringstream is(text);
    if (!(is >> g.x0_mm >> c1 >> g.x1_mm >> c2 >> g.nx >> comma >> g.y0_mm >> c3 >> g.y1_mm >> c4 >> g.ny) ||
        c1 != ':' || c2 != ':' || comma != ',' || c3 != ':' || c4 != ':')
        throw Error(ErrorKind::Config, "target grid must look like x0:x1:nx,y0:y1:ny (mm), got '" + text + "'");
    if (g.nx < 1 || g.ny < 1) throw Error(ErrorKind::Config, "target grid counts must be >= 1");
    return g;
}

Lut build_lut(const ModalBasis& basis, const std::vector<Point>& targets, const SsimParams& metric,
              const AnnealConfig& cfg, std::uint64_t fingerprint, unsigned threads) {
    cfg.validate();
    for (const Point& t : targets)
        if (!basis.spec().strictly_contains(t)) throw Error(ErrorKind::OutOfDomain, "LUT target outside the plate");

    const ResponseCache cache(basis);
    std::vector<LutEntry> entries(targets.size());
    std::vector<std::exception_ptr> errors(targets.size());
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t i = next++; i < targets.size(); i = next++) {
            try {
                AnnealConfig local = cfg;
                local.seed = cfg.seed + i;
                const DecoupleResult r = anneal(basis, cache, targets[i], metric, local);
                entries[i] = LutEntry{targets[i].x * 1e3, targets[i].y * 1e3, r.best_phasors, r.best_ssim};
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };

    unsigned n = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
    n = static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(1, targets.size())));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return Lut(fingerprint, std::move(entries));
}

}  // namespace platefocus
