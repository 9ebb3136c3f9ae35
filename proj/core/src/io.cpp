#include "platefocus/io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "platefocus/errors.hpp"

namespace platefocus {

using nlohmann::json;

namespace {

constexpr const char* kResultFormat = "platefocus-decouple";
constexpr int kResultVersion = 1;

json phasors_json(const ActuatorPhasor& p) {
    return {{"amplitude", p.amplitude}, {"phase_deg", p.phase_deg}};
}

ActuatorPhasor phasors_from(const json& j) {
    ActuatorPhasor p;
    try {
        const auto amp = j.at("amplitude").get<std::vector<double>>();
        const auto ph = j.at("phase_deg").get<std::vector<double>>();
        if (amp.size() != kActuatorCount || ph.size() != kActuatorCount)
            throw Error(ErrorKind::Config, "phasor lists need exactly 5 entries");
        for (std::size_t i = 0; i < kActuatorCount; ++i) {
            p.amplitude[i] = amp[i];
            p.phase_deg[i] = ph[i];
        }
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Config, std::string("malformed phasors: ") + e.what());
    }
    return p;
}

}  // namespace

void write_result(std::ostream& os, const DecoupleResult& result, const RunConfig& config, bool include_gains) {
    json j;
    j["format"] = kResultFormat;
    j["version"] = kResultVersion;
    j["target_mm"] = {result.target.x * 1e3, result.target.y * 1e3};
    j["best_ssim"] = result.best_ssim;
    j["initial_ssim"] = result.trajectory.empty() ? result.best_ssim : result.trajectory.front().current_ssim;
    j["steps"] = result.trajectory.empty() ? 0 : result.trajectory.back().step;
    j["best_phasors"] = phasors_json(result.best_phasors);
    j["config"] = json::parse(config.to_json());
    if (include_gains) {
        json rows = json::array();
        for (std::size_t i = 0; i < kActuatorCount; ++i) {
            std::vector<double> row(kPhaseBins);
            for (std::size_t d = 0; d < kPhaseBins; ++d) row[d] = result.best_gains.at(i, d);
            rows.push_back(row);
        }
        j["gains"] = rows;
    }
    os << j.dump(2) << '\n';
}

void save_result(const std::string& path, const DecoupleResult& result, const RunConfig& config, bool include_gains) {
    std::ostringstream ss;
    write_result(ss, result, config, include_gains);
    save_text(path, ss.str());
}

StoredResult read_result(std::istream& is) {
    json j;
    try {
        j = json::parse(is);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::Config, std::string("result file is not valid JSON: ") + e.what());
    }
    if (j.value("format", "") != kResultFormat) throw Error(ErrorKind::BadMagic, "not a platefocus-decouple file");
    if (j.value("version", 0) != kResultVersion) throw Error(ErrorKind::BadVersion, "unsupported result file version");
    StoredResult s;
    try {
        const auto t = j.at("target_mm").get<std::vector<double>>();
        if (t.size() != 2) throw Error(ErrorKind::Config, "target_mm needs two numbers");
        s.result.target = {t[0] * 1e-3, t[1] * 1e-3};
        s.result.best_ssim = j.at("best_ssim").get<double>();
        s.initial_ssim = j.value("initial_ssim", s.result.best_ssim);
        s.result.best_phasors = phasors_from(j.at("best_phasors"));
        s.config = RunConfig::from_json(j.at("config").dump());
        if (j.contains("gains")) {
            const auto rows = j["gains"].get<std::vector<std::vector<double>>>();
            if (rows.size() != kActuatorCount) throw Error(ErrorKind::Config, "gains need 5 rows");
            for (std::size_t i = 0; i < kActuatorCount; ++i) {
                if (rows[i].size() != kPhaseBins) throw Error(ErrorKind::Config, "gain rows need 360 entries");
                for (std::size_t d = 0; d < kPhaseBins; ++d) s.result.best_gains.at(i, d) = rows[i][d];
            }
            s.has_gains = true;
        }
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Config, std::string("malformed result file: ") + e.what());
    }
    return s;
}

StoredResult load_result(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error(ErrorKind::Io, "cannot open " + path);
    return read_result(is);
}

void save_trajectory_csv(const std::string& path, const DecoupleResult& result) {
    std::ostringstream ss;
    ss.precision(17);
    ss << "step,current_ssim,best_ssim\n";
    for (const TrajectoryPoint& t : result.trajectory) ss << t.step << ',' << t.current_ssim << ',' << t.best_ssim << '\n';
    save_text(path, ss.str());
}

std::string phasors_to_json(const ActuatorPhasor& p) { return phasors_json(p).dump(2) + "\n"; }

ActuatorPhasor phasors_from_json(const std::string& text) {
    try {
        return phasors_from(json::parse(text));
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::Config, std::string("phasor file is not valid JSON: ") + e.what());
    }
}

void save_text(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error(ErrorKind::Io, "cannot open " + path + " for writing");
    os << text;
    if (!os) throw Error(ErrorKind::Io, "failed writing " + path);
}

std::string load_text(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error(ErrorKind::Io, "cannot open " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace platefocus
