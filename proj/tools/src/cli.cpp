#include "platefocus_cli/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "platefocus/config.hpp"
#include "platefocus/decoupler.hpp"
#include "platefocus/drive_link.hpp"
#include "platefocus/errors.hpp"
#include "platefocus/image_io.hpp"
#include "platefocus/io.hpp"
#include "platefocus/lut.hpp"
#include "platefocus/pattern.hpp"
#include "platefocus/ssim.hpp"
#include "platefocus/udp_link.hpp"

namespace platefocus::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Common {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out;
    bool fast = false;
};

RunConfig resolve_config(const Common& common) {
    RunConfig cfg;
    std::string path = common.config_path;
    if (path.empty())
        if (const char* env = std::getenv(kConfigEnvVar)) path = env;
    if (!path.empty()) cfg = RunConfig::load(path);
    if (common.fast) cfg.apply_fast();
    if (common.seed) cfg.anneal.seed = *common.seed;
    // run exactly what config.json and result.json will record
    return RunConfig::from_json(cfg.to_json());
}

Point parse_point_mm(const std::string& text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos) throw Error(ErrorKind::Config, "expected X,Y in millimeters, got '" + text + "'");
    try {
        std::size_t used_x = 0, used_y = 0;
        const std::string xs = text.substr(0, comma), ys = text.substr(comma + 1);
        const double x = std::stod(xs, &used_x);
        const double y = std::stod(ys, &used_y);
        if (used_x != xs.size() || used_y != ys.size()) throw std::invalid_argument("trailing characters");
        return {x * 1e-3, y * 1e-3};
    } catch (const std::logic_error&) {
        throw Error(ErrorKind::Config, "expected X,Y in millimeters, got '" + text + "'");
    }
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

fs::path prepare_out(const std::string& out) {
    if (out.empty()) throw Error(ErrorKind::Config, "--out is required");
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw Error(ErrorKind::Io, "cannot create " + out + ": " + ec.message());
    return fs::path(out);
}

std::vector<std::string> tags(const std::string& command, const RunConfig& cfg,
                              std::initializer_list<std::string> extra = {}) {
    std::vector<std::string> t{"platefocus " + command, "config_fingerprint " + fingerprint_hex(cfg.fingerprint())};
    t.insert(t.end(), extra);
    return t;
}

void write_image_pair(const fs::path& dir, const std::string& stem, const Field& image,
                      const std::vector<std::string>& comments) {
    save_pgm16((dir / (stem + ".pgm")).string(), image, comments);
    save_csv((dir / (stem + ".csv")).string(), image, comments);
}

void write_config(const fs::path& dir, const RunConfig& cfg) { save_text((dir / "config.json").string(), cfg.to_json()); }

json pixel_json(PixelIndex p) { return json::array({p.ix, p.iy}); }

json phasor_summary(const ActuatorPhasor& p) {
    return {{"amplitude", std::vector<double>(p.amplitude.begin(), p.amplitude.end())},
            {"phase_deg", std::vector<double>(p.phase_deg.begin(), p.phase_deg.end())}};
}

double pixel_distance(PixelIndex a, PixelIndex b) { return std::hypot(a.ix - b.ix, a.iy - b.iy); }

ActuatorPhasor load_drive(const std::string& result_path, const std::string& phasors_path) {
    if (!result_path.empty() && !phasors_path.empty())
        throw Error(ErrorKind::Config, "give either --result or --phasors, not both");
    if (!result_path.empty()) return load_result(result_path).result.best_phasors;
    if (!phasors_path.empty()) return phasors_from_json(load_text(phasors_path));
    throw Error(ErrorKind::Config, "one of --result or --phasors is required");
}

// --- simulate ---------------------------------------------------------------

struct SimulateArgs {
    int actuator = 3;
    double amplitude = 1.0;
    int phase = 0;
    std::string shape = "sine";
};

void cmd_simulate(const Common& common, const SimulateArgs& a, std::ostream& out) {
    const RunConfig cfg = resolve_config(common);
    cfg.validate();
    DriveWave wave;
    wave.shape = parse_wave_shape(a.shape);
    wave.frequency = cfg.drive_frequency;
    wave.amplitude = a.amplitude;
    wave.phase_deg = a.phase;
    wave.validate();
    const ModalBasis basis = cfg.build_basis();
    const PatternSeries series =
        single_actuator_pattern(basis, static_cast<std::size_t>(a.actuator - 1), wave, cfg.samples_per_period);
    const EnergyImage energy = rms_energy(series);

    const fs::path dir = prepare_out(common.out);
    const auto comments = tags("simulate", cfg,
                               {"actuator " + std::to_string(a.actuator), "amplitude " + fmt(a.amplitude),
                                "phase_deg " + std::to_string(a.phase)});
    write_config(dir, cfg);
    fs::create_directories(dir / "frames");
    for (std::size_t s = 0; s < series.sample_count(); ++s) {
        char name[32];
        std::snprintf(name, sizeof name, "frame_%03zu.pgm", s);
        auto frame_comments = comments;
        frame_comments.push_back("sample " + std::to_string(s) + " of " + std::to_string(series.sample_count()));
        save_pgm16_signed((dir / "frames" / name).string(), series.frames[s], frame_comments);
    }
    write_image_pair(dir, "energy", energy.values, comments);

    const PixelIndex peak = argmax(energy.values);
    const PixelIndex source = cfg.plate.nearest_pixel(cfg.layout.positions[static_cast<std::size_t>(a.actuator - 1)]);
    json summary = {{"command", "simulate"},
                    {"actuator", a.actuator},
                    {"frames", series.sample_count()},
                    {"energy_max", max_abs(energy.values)},
                    {"energy_argmax_px", pixel_json(peak)},
                    {"actuator_px", pixel_json(source)},
                    {"modes", basis.mode_count()}};
    save_text((dir / "summary.json").string(), summary.dump(2) + "\n");
    out << summary.dump(2) << '\n';
}

// --- energy -----------------------------------------------------------------

struct EnergyArgs {
    std::string result;
    std::string phasors;
    std::string target;
};

void cmd_energy(const Common& common, const EnergyArgs& a, std::ostream& out) {
    RunConfig cfg = resolve_config(common);
    const int sources = !a.result.empty() + !a.phasors.empty() + !a.target.empty();
    if (sources != 1) throw Error(ErrorKind::Config, "give exactly one of --result, --phasors or --target");
    std::optional<Point> target;
    if (!a.target.empty()) target = parse_point_mm(a.target);
    std::optional<StoredResult> stored;
    if (!a.result.empty()) {
        stored = load_result(a.result);
        cfg = stored->config;
    }
    cfg.validate();
    const ModalBasis basis = cfg.build_basis();
    if (target && !basis.spec().strictly_contains(*target))
        throw Error(ErrorKind::OutOfDomain, "target is outside the plate");

    EnergyImage energy;
    std::string source;
    if (target) {
        energy = target_energy(basis, *target);
        source = "target " + fmt(target->x * 1e3) + "," + fmt(target->y * 1e3) + " mm";
    } else {
        const ActuatorPhasor drive = stored ? stored->result.best_phasors : load_drive("", a.phasors);
        energy = phasor_energy(ResponseCache(basis), drive);
        source = "drive phasors";
    }
    const fs::path dir = prepare_out(common.out);
    write_config(dir, cfg);
    write_image_pair(dir, "energy", energy.values, tags("energy", cfg, {"source " + source}));
    json summary = {{"command", "energy"},
                    {"source", source},
                    {"energy_max", max_abs(energy.values)},
                    {"energy_argmax_px", pixel_json(argmax(energy.values))}};
    out << summary.dump(2) << '\n';
}

// --- decouple / render ------------------------------------------------------

struct DecoupleArgs {
    std::string target;
    std::optional<int> iterations;
    std::string accept_rule;
    bool compact = false;
    bool no_gains = false;
};

json render_outputs(const fs::path& dir, const std::string& command, const RunConfig& cfg, const ModalBasis& basis,
                    const ResponseCache& cache, const DecoupleResult& result) {
    const EnergyImage composite = phasor_energy(cache, result.best_phasors);
    const EnergyImage target = target_energy(basis, result.target);
    const double score = ssim(composite, target, cfg.ssim);
    const auto comments = tags(command, cfg,
                               {"target_mm " + fmt(result.target.x * 1e3) + " " + fmt(result.target.y * 1e3)});
    write_image_pair(dir, "composite", composite.values, comments);
    write_image_pair(dir, "target", target.values, comments);
    save_pgm16((dir / "comparison.pgm").string(), side_by_side(composite.values, target.values),
               tags(command, cfg, {"left composite, right target, each scaled to its own maximum"}));

    const PixelIndex target_px = cfg.plate.nearest_pixel(result.target);
    const PixelIndex composite_peak = argmax(composite.values);
    const PixelIndex target_peak = argmax(target.values);
    return {{"target_mm", {result.target.x * 1e3, result.target.y * 1e3}},
            {"best_ssim", result.best_ssim},
            {"rendered_ssim", score},
            {"target_px", pixel_json(target_px)},
            {"composite_argmax_px", pixel_json(composite_peak)},
            {"target_image_argmax_px", pixel_json(target_peak)},
            {"argmax_offset_px", pixel_distance(composite_peak, target_px)},
            {"best_phasors", phasor_summary(result.best_phasors)}};
}

void cmd_decouple(const Common& common, const DecoupleArgs& a, std::ostream& out) {
    RunConfig cfg = resolve_config(common);
    if (a.iterations) cfg.anneal.iterations = *a.iterations;
    if (!a.accept_rule.empty()) cfg.anneal.accept_rule = parse_accept_rule(a.accept_rule);
    if (a.compact) cfg.anneal.compact = true;
    const Point target = parse_point_mm(a.target);
    cfg.validate();
    if (!cfg.plate.strictly_contains(target)) throw Error(ErrorKind::OutOfDomain, "target is outside the plate");

    const ModalBasis basis = cfg.build_basis();
    const ResponseCache cache(basis);
    const DecoupleResult result = anneal(basis, cache, target, cfg.ssim, cfg.anneal);

    const fs::path dir = prepare_out(common.out);
    write_config(dir, cfg);
    save_result((dir / "result.json").string(), result, cfg, !a.no_gains);
    save_trajectory_csv((dir / "trajectory.csv").string(), result);
    json summary = render_outputs(dir, "decouple", cfg, basis, cache, result);
    summary["command"] = "decouple";
    summary["initial_ssim"] = result.trajectory.front().current_ssim;
    summary["iterations"] = cfg.anneal.iterations;
    save_text((dir / "summary.json").string(), summary.dump(2) + "\n");
    out << summary.dump(2) << '\n';
}

void cmd_render(const Common& common, const std::string& result_path, std::ostream& out) {
    const StoredResult stored = load_result(result_path);
    const RunConfig& cfg = stored.config;
    cfg.validate();
    const ModalBasis basis = cfg.build_basis();
    const ResponseCache cache(basis);
    const fs::path dir = prepare_out(common.out);
    write_config(dir, cfg);
    json summary = render_outputs(dir, "render", cfg, basis, cache, stored.result);
    summary["command"] = "render";
    out << summary.dump(2) << '\n';
}

// --- lut --------------------------------------------------------------------

struct LutArgs {
    std::string grid;
    std::string lut;
    std::string at;
    unsigned threads = 0;
    std::optional<int> iterations;
};

void cmd_lut_build(const Common& common, const LutArgs& a, std::ostream& out) {
    RunConfig cfg = resolve_config(common);
    if (a.iterations) cfg.anneal.iterations = *a.iterations;
    const TargetGrid grid = TargetGrid::parse(a.grid);
    cfg.validate();
    const std::vector<Point> targets = grid.points_m();
    for (const Point& p : targets)
        if (!cfg.plate.strictly_contains(p)) throw Error(ErrorKind::OutOfDomain, "LUT grid reaches outside the plate");
    const ModalBasis basis = cfg.build_basis();
    const Lut lut = build_lut(basis, targets, cfg.ssim, cfg.anneal, cfg.fingerprint(), a.threads);
    const fs::path dir = prepare_out(common.out);
    write_config(dir, cfg);
    lut.save((dir / "lut.txt").string());
    double worst = 1.0;
    for (const LutEntry& e : lut.entries()) worst = std::min(worst, e.ssim);
    json summary = {{"command", "lut build"},
                    {"entries", lut.entries().size()},
                    {"fingerprint", fingerprint_hex(lut.fingerprint())},
                    {"min_ssim", worst}};
    out << summary.dump(2) << '\n';
}

void cmd_lut_query(const Common& common, const LutArgs& a, std::ostream& out) {
    const RunConfig cfg = resolve_config(common);
    const Point at = parse_point_mm(a.at);
    const Lut lut = Lut::load(a.lut);
    lut.check_fingerprint(cfg.fingerprint());
    const LutHit hit = lut.nearest(at.x * 1e3, at.y * 1e3);
    json summary = {{"query_mm", {at.x * 1e3, at.y * 1e3}},
                    {"index", hit.index},
                    {"distance_mm", hit.distance_mm},
                    {"entry",
                     {{"x_mm", hit.entry.x_mm},
                      {"y_mm", hit.entry.y_mm},
                      {"ssim", hit.entry.ssim},
                      {"phasors", phasor_summary(hit.entry.phasors)}}}};
    out << summary.dump(2) << '\n';
}

// --- stream / board ---------------------------------------------------------

struct LinkArgs {
    std::string result;
    std::string phasors;
    std::optional<std::string> host;
    std::optional<int> port;
    std::optional<double> duration;
    std::optional<double> loss_rate;
    std::optional<double> timeout;
    std::uint64_t loss_seed = 1;
    bool no_realtime = false;
};

void apply_link_overrides(RunConfig& cfg, const LinkArgs& a) {
    if (a.host) cfg.link.endpoint.host = *a.host;
    if (a.port) {
        if (*a.port < 0 || *a.port > 65535) throw Error(ErrorKind::Config, "port out of range");
        cfg.link.endpoint.port = static_cast<std::uint16_t>(*a.port);
    }
    if (a.duration) cfg.link.duration_s = *a.duration;
    if (a.loss_rate) cfg.link.loss_rate = *a.loss_rate;
    if (a.timeout) cfg.link.receive_timeout_s = *a.timeout;
    if (a.no_realtime) cfg.link.realtime = false;
}

void cmd_stream(const Common& common, const LinkArgs& a, std::ostream& out) {
    RunConfig cfg = resolve_config(common);
    apply_link_overrides(cfg, a);
    cfg.validate();
    const ActuatorPhasor drive = load_drive(a.result, a.phasors);
    const double scale = drive_scale_for(drive);
    StreamOptions options;
    options.duration_s = cfg.link.duration_s;
    options.loss_rate = cfg.link.loss_rate;
    options.loss_seed = a.loss_seed;
    options.realtime = cfg.link.realtime;
    const StreamStats stats = stream_phasors(scale_phasors(drive, scale), cfg.drive_frequency, cfg.link.endpoint, options);
    json summary = {{"command", "stream"},
                    {"drive_scale", scale},
                    {"packets_planned", stats.packets_planned},
                    {"packets_sent", stats.packets_sent},
                    {"packets_dropped", stats.packets_dropped},
                    {"dropped_seqs", stats.dropped_seqs}};
    if (!common.out.empty()) {
        const fs::path dir = prepare_out(common.out);
        write_config(dir, cfg);
        save_text((dir / "stream.json").string(), summary.dump(2) + "\n");
    }
    out << summary.dump(2) << '\n';
}

void cmd_board(const Common& common, const LinkArgs& a, std::ostream& out) {
    RunConfig cfg = resolve_config(common);
    apply_link_overrides(cfg, a);
    cfg.validate();
    const ModalBasis basis = cfg.build_basis();
    const ResponseCache cache(basis);
    UdpReceiver receiver(cfg.link.endpoint);
    ReceiveOptions options;
    options.frequency = cfg.drive_frequency;
    options.first_packet_timeout_s = cfg.link.receive_timeout_s;
    const ReceiveReport report = receiver.receive(options);
    const EnergyImage shown = board_sim(report.phasors, cache);

    json summary = {{"command", "board"},
                    {"datagrams", report.datagrams},
                    {"decode_errors", report.decode_errors},
                    {"delivered", report.reassembly.delivered},
                    {"gaps", report.reassembly.gaps},
                    {"late_dropped", report.reassembly.late_dropped},
                    {"duplicates", report.reassembly.duplicates},
                    {"samples_used", report.samples_used},
                    {"received_phasors", phasor_summary(report.phasors)}};
    if (!a.result.empty()) {
        const StoredResult stored = load_result(a.result);
        const EnergyImage expected = phasor_energy(cache, stored.result.best_phasors);
        summary["ssim_vs_result"] = ssim(shown, expected, cfg.ssim);
    }
    const fs::path dir = prepare_out(common.out);
    write_config(dir, cfg);
    save_text((dir / "received_phasors.json").string(), phasors_to_json(report.phasors));
    write_image_pair(dir, "board_energy", shown.values, tags("board", cfg));
    save_text((dir / "board.json").string(), summary.dump(2) + "\n");
    out << summary.dump(2) << '\n';
}

void add_common(CLI::App* app, Common& common) {
    app->add_option("--config", common.config_path,
                    std::string("JSON config file (default: $") + kConfigEnvVar + ")");
    app->add_option("--seed", common.seed, "annealing seed");
    app->add_option("--out", common.out, "output directory");
    app->add_flag("--fast", common.fast, "desk-scale grid and iteration count");
}

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Config: return kExitConfig;
        case ErrorKind::Io: return kExitIo;
        default: return kExitFailure;
    }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Vibration focusing on a thin plate driven by five actuators", "platefocus"};
    app.require_subcommand(1);
    Common common;

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "single-actuator vibration frames and energy image");
    add_common(simulate, common);
    simulate->add_option("--actuator", sim.actuator, "actuator 1..5")->check(CLI::Range(1, 5));
    simulate->add_option("--amplitude", sim.amplitude, "drive amplitude")->check(CLI::Range(0.0, 1e9));
    simulate->add_option("--phase", sim.phase, "phase in whole degrees");
    simulate->add_option("--shape", sim.shape, "wave shape");

    EnergyArgs en;
    auto* energy = app.add_subcommand("energy", "energy image of a drive or of a target point source");
    add_common(energy, common);
    energy->add_option("--result", en.result, "decouple result.json");
    energy->add_option("--phasors", en.phasors, "phasor JSON file");
    energy->add_option("--target", en.target, "point source X,Y in mm");

    DecoupleArgs dec;
    auto* decouple = app.add_subcommand("decouple", "anneal a drive that focuses at a target point");
    add_common(decouple, common);
    decouple->add_option("--target", dec.target, "target X,Y in mm")->required();
    decouple->add_option("--iterations", dec.iterations, "annealing iterations");
    decouple->add_option("--accept-rule", dec.accept_rule, "prose or literal");
    decouple->add_flag("--compact", dec.compact, "search the ten phasor numbers directly");
    decouple->add_flag("--no-gains", dec.no_gains, "omit the 5x360 gain matrix from result.json");

    std::string render_result;
    auto* render = app.add_subcommand("render", "re-render composite and target images of a result");
    add_common(render, common);
    render->add_option("--result", render_result, "decouple result.json")->required();

    LutArgs lut_args;
    auto* lut = app.add_subcommand("lut", "look-up tables");
    lut->require_subcommand(1);
    auto* lut_build = lut->add_subcommand("build", "decouple every point of a target grid");
    add_common(lut_build, common);
    lut_build->add_option("--grid", lut_args.grid, "x0:x1:nx,y0:y1:ny in mm")->required();
    lut_build->add_option("--threads", lut_args.threads, "worker threads (0 = all cores)");
    lut_build->add_option("--iterations", lut_args.iterations, "annealing iterations");
    auto* lut_query = lut->add_subcommand("query", "nearest LUT entry to a point");
    add_common(lut_query, common);
    lut_query->add_option("--lut", lut_args.lut, "LUT file")->required();
    lut_query->add_option("--at", lut_args.at, "query X,Y in mm")->required();

    LinkArgs link;
    auto add_link = [&](CLI::App* sub) {
        add_common(sub, common);
        sub->add_option("--host", link.host, "peer or bind address");
        sub->add_option("--port", link.port, "UDP port");
        sub->add_option("--result", link.result, "decouple result.json");
    };
    auto* stream = app.add_subcommand("stream", "send a drive over UDP");
    add_link(stream);
    stream->add_option("--phasors", link.phasors, "phasor JSON file");
    stream->add_option("--duration", link.duration, "seconds of drive");
    stream->add_option("--loss-rate", link.loss_rate, "fraction of interior packets to skip");
    stream->add_option("--loss-seed", link.loss_seed, "seed for loss injection");
    stream->add_flag("--no-realtime", link.no_realtime, "send without pacing");
    auto* board = app.add_subcommand("board", "receive a drive and simulate the plate");
    add_link(board);
    board->add_option("--timeout", link.timeout, "seconds to wait for the first packet");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (simulate->parsed()) cmd_simulate(common, sim, out);
        else if (energy->parsed()) cmd_energy(common, en, out);
        else if (decouple->parsed()) cmd_decouple(common, dec, out);
        else if (render->parsed()) cmd_render(common, render_result, out);
        else if (lut_build->parsed()) cmd_lut_build(common, lut_args, out);
        else if (lut_query->parsed()) cmd_lut_query(common, lut_args, out);
        else if (stream->parsed()) cmd_stream(common, link, out);
        else if (board->parsed()) cmd_board(common, link, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e.kind());
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    }
    return kExitOk;
}

}  // namespace platefocus::cli
