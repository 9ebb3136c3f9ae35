#include "platefocus/config.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "platefocus/errors.hpp"
#include "platefocus/hash.hpp"

namespace platefocus {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::string& section, std::initializer_list<const char*> keys) {
    if (!obj.is_object()) throw Error(ErrorKind::Config, "'" + section + "' must be an object");
    std::set<std::string> allowed(keys.begin(), keys.end());
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.contains(it.key())) throw Error(ErrorKind::Config, "unknown key '" + section + "." + it.key() + "'");
}

template <typename T>
void read_opt(const json& obj, const char* key, T& out) {
    if (auto it = obj.find(key); it != obj.end()) {
        try {
            out = it->get<T>();
        } catch (const json::exception& e) {
            throw Error(ErrorKind::Config, std::string("bad value for '") + key + "': " + e.what());
        }
    }
}

// Lengths are written as millimeters rounded to 12 significant digits, so
// parse -> write is a fixed point and fingerprints survive a round trip.
double to_mm(double meters) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", meters * 1e3);
    return std::strtod(buf, nullptr);
}

void read_mm(const json& obj, const char* key, double& meters) {
    double mm = to_mm(meters);
    read_opt(obj, key, mm);
    meters = mm / 1e3;
}

json section_json(const RunConfig& c, bool include_link) {
    json j;
    j["plate"] = {{"width_mm", to_mm(c.plate.a)},
                  {"length_mm", to_mm(c.plate.b)},
                  {"thickness_mm", to_mm(c.plate.h)},
                  {"youngs_modulus_pa", c.plate.youngs_modulus},
                  {"poisson", c.plate.poisson},
                  {"density_kg_m3", c.plate.density},
                  {"grid_nx", c.plate.grid_nx},
                  {"grid_ny", c.plate.grid_ny}};
    json positions = json::array();
    for (const Point& p : c.layout.positions) positions.push_back({to_mm(p.x), to_mm(p.y)});
    j["actuators"] = {{"positions_mm", positions}};
    j["drive"] = {{"frequency_hz", c.drive_frequency},
                  {"truncation_multiple", c.truncation_multiple},
                  {"samples_per_period", c.samples_per_period}};
    j["ssim"] = {{"window", c.ssim.window},
                 {"kind", to_string(c.ssim.kind)},
                 {"sigma", c.ssim.sigma},
                 {"k1", c.ssim.k1},
                 {"k2", c.ssim.k2},
                 {"dynamic_range", c.ssim.dynamic_range}};
    j["anneal"] = {{"iterations", c.anneal.iterations},
                   {"perturb_count", c.anneal.perturb_count},
                   {"perturb_scale", c.anneal.perturb_scale},
                   {"seed", c.anneal.seed},
                   {"gain_max", c.anneal.gain_max},
                   {"accept_rule", to_string(c.anneal.accept_rule)},
                   {"compact", c.anneal.compact},
                   {"compact_phase_step_deg", c.anneal.compact_phase_step_deg}};
    if (include_link)
        j["link"] = {{"host", c.link.endpoint.host},
                     {"port", c.link.endpoint.port},
                     {"duration_s", c.link.duration_s},
                     {"loss_rate", c.link.loss_rate},
                     {"receive_timeout_s", c.link.receive_timeout_s},
                     {"realtime", c.link.realtime}};
    return j;
}

}  // namespace

void RunConfig::apply_fast() {
    plate.grid_nx = kFastGridNx;
    plate.grid_ny = kFastGridNy;
    anneal.iterations = kFastIterations;
}

void RunConfig::validate() const {
    plate.validate();
    layout.validate(plate);
    if (!(drive_frequency > 0.0)) throw Error(ErrorKind::Config, "drive frequency must be positive");
    if (!(truncation_multiple >= 1.0)) throw Error(ErrorKind::Config, "truncation multiple must be >= 1");
    if (samples_per_period < 3) throw Error(ErrorKind::Config, "samples_per_period must be >= 3");
    ssim.validate();
    anneal.validate();
    if (!(link.loss_rate >= 0.0 && link.loss_rate < 1.0)) throw Error(ErrorKind::Config, "link loss rate must be in [0, 1)");
}

std::string RunConfig::to_json() const { return section_json(*this, true).dump(2) + "\n"; }

RunConfig RunConfig::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::Config, std::string("config is not valid JSON: ") + e.what());
    }
    reject_unknown(j, "<root>", {"plate", "actuators", "drive", "ssim", "anneal", "link"});
    RunConfig c;
    if (j.contains("plate")) {
        const json& p = j["plate"];
        reject_unknown(p, "plate",
                       {"width_mm", "length_mm", "thickness_mm", "youngs_modulus_pa", "poisson", "density_kg_m3",
                        "grid_nx", "grid_ny"});
        read_mm(p, "width_mm", c.plate.a);
        read_mm(p, "length_mm", c.plate.b);
        read_mm(p, "thickness_mm", c.plate.h);
        read_opt(p, "youngs_modulus_pa", c.plate.youngs_modulus);
        read_opt(p, "poisson", c.plate.poisson);
        read_opt(p, "density_kg_m3", c.plate.density);
        read_opt(p, "grid_nx", c.plate.grid_nx);
        read_opt(p, "grid_ny", c.plate.grid_ny);
    }
    c.layout = ActuatorLayout::quincunx(c.plate);
    if (j.contains("actuators")) {
        const json& a = j["actuators"];
        reject_unknown(a, "actuators", {"positions_mm", "inset_mm"});
        if (a.contains("positions_mm") && a.contains("inset_mm"))
            throw Error(ErrorKind::Config, "give either actuators.positions_mm or actuators.inset_mm, not both");
        if (a.contains("inset_mm")) {
            double inset = 15e-3;
            read_mm(a, "inset_mm", inset);
            c.layout = ActuatorLayout::quincunx(c.plate, inset);
        }
        if (a.contains("positions_mm")) {
            const json& pos = a["positions_mm"];
            if (!pos.is_array() || pos.size() != kActuatorCount)
                throw Error(ErrorKind::Config, "actuators.positions_mm needs exactly 5 [x, y] pairs");
            for (std::size_t i = 0; i < kActuatorCount; ++i) {
                if (!pos[i].is_array() || pos[i].size() != 2 || !pos[i][0].is_number() || !pos[i][1].is_number())
                    throw Error(ErrorKind::Config, "actuator position must be [x_mm, y_mm]");
                c.layout.positions[i] = {pos[i][0].get<double>() / 1e3, pos[i][1].get<double>() / 1e3};
            }
        }
    }
    if (j.contains("drive")) {
        const json& d = j["drive"];
        reject_unknown(d, "drive", {"frequency_hz", "truncation_multiple", "samples_per_period"});
        read_opt(d, "frequency_hz", c.drive_frequency);
        read_opt(d, "truncation_multiple", c.truncation_multiple);
        read_opt(d, "samples_per_period", c.samples_per_period);
    }
    if (j.contains("ssim")) {
        const json& s = j["ssim"];
        reject_unknown(s, "ssim", {"window", "kind", "sigma", "k1", "k2", "dynamic_range"});
        read_opt(s, "window", c.ssim.window);
        std::string kind = to_string(c.ssim.kind);
        read_opt(s, "kind", kind);
        c.ssim.kind = parse_window_kind(kind);
        read_opt(s, "sigma", c.ssim.sigma);
        read_opt(s, "k1", c.ssim.k1);
        read_opt(s, "k2", c.ssim.k2);
        read_opt(s, "dynamic_range", c.ssim.dynamic_range);
    }
    if (j.contains("anneal")) {
        const json& a = j["anneal"];
        reject_unknown(a, "anneal",
                       {"iterations", "perturb_count", "perturb_scale", "seed", "gain_max", "accept_rule", "compact",
                        "compact_phase_step_deg"});
        read_opt(a, "iterations", c.anneal.iterations);
        read_opt(a, "perturb_count", c.anneal.perturb_count);
        read_opt(a, "perturb_scale", c.anneal.perturb_scale);
        read_opt(a, "seed", c.anneal.seed);
        read_opt(a, "gain_max", c.anneal.gain_max);
        std::string rule = to_string(c.anneal.accept_rule);
        read_opt(a, "accept_rule", rule);
        c.anneal.accept_rule = parse_accept_rule(rule);
        read_opt(a, "compact", c.anneal.compact);
        read_opt(a, "compact_phase_step_deg", c.anneal.compact_phase_step_deg);
    }
    if (j.contains("link")) {
        const json& l = j["link"];
        reject_unknown(l, "link", {"host", "port", "duration_s", "loss_rate", "receive_timeout_s", "realtime"});
        read_opt(l, "host", c.link.endpoint.host);
        read_opt(l, "port", c.link.endpoint.port);
        read_opt(l, "duration_s", c.link.duration_s);
        read_opt(l, "loss_rate", c.link.loss_rate);
        read_opt(l, "receive_timeout_s", c.link.receive_timeout_s);
        read_opt(l, "realtime", c.link.realtime);
    }
    return c;
}

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error(ErrorKind::Config, "cannot open config file " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return from_json(ss.str());
}

std::uint64_t RunConfig::fingerprint() const { return fnv1a64(section_json(*this, false).dump()); }

ModalBasis RunConfig::build_basis() const {
    return build_modal_basis(plate, layout, drive_frequency, truncation_multiple);
}

std::string fingerprint_hex(std::uint64_t fp) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, fp);
    return buf;
}

}  // namespace platefocus
