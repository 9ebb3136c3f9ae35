#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <chrono>
#include <future>
#include <iterator>
#include <sstream>
#include <thread>
#include <unistd.h>

#include "json.hpp"
#include "platefocus/config.hpp"
#include "platefocus/image_io.hpp"
#include "platefocus_cli/cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace platefocus {
namespace {

struct CliRun {
    int code = 0;
    std::string out;
    std::string err;
};

CliRun run_cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    CliRun r;
    r.code = cli::run(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(is), {}};
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        root = fs::temp_directory_path() /
               ("platefocus_cli_" + std::to_string(::getpid()) + "_" +
                ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::remove_all(root);
        fs::create_directories(root);
        config = (root / "small.json").string();
        std::ofstream(config) << R"({"plate": {"grid_nx": 36, "grid_ny": 74},
                                     "drive": {"truncation_multiple": 100},
                                     "anneal": {"iterations": 150}})";
    }
    void TearDown() override { fs::remove_all(root); }

    std::string dir(const std::string& name) const { return (root / name).string(); }

    fs::path root;
    std::string config;
};

TEST_F(Cli, SimulatePeaksAtTheDrivenActuator) {
    const CliRun r = run_cli({"simulate", "--config", config, "--actuator", "3", "--out", dir("sim")});
    ASSERT_EQ(r.code, 0) << r.err;
    const json s = json::parse(slurp(root / "sim" / "summary.json"));
    // distance in pixels from the argmax pixel to the actuator's exact position
    const RunConfig used = RunConfig::load((root / "sim" / "config.json").string());
    const Point at = used.layout.positions[kCentralActuator];
    const double dx = s["energy_argmax_px"][0].get<int>() - at.x / used.plate.pitch_x();
    const double dy = s["energy_argmax_px"][1].get<int>() - at.y / used.plate.pitch_y();
    EXPECT_LE(std::hypot(dx, dy), 1.0) << s.dump();
    EXPECT_EQ(s["frames"].get<int>(), 64);
    EXPECT_TRUE(fs::exists(root / "sim" / "frames" / "frame_063.pgm"));
    EXPECT_TRUE(fs::exists(root / "sim" / "energy.pgm"));
    EXPECT_TRUE(fs::exists(root / "sim" / "energy.csv"));
    const Pgm16 energy = load_pgm16((root / "sim" / "energy.pgm").string());
    EXPECT_EQ(energy.width, 36);
    EXPECT_EQ(energy.height, 74);
}

TEST_F(Cli, ZeroAmplitudeGivesZeroImages) {
    const CliRun r = run_cli({"simulate", "--config", config, "--amplitude", "0", "--out", dir("zero")});
    ASSERT_EQ(r.code, 0) << r.err;
    for (auto px : load_pgm16((root / "zero" / "energy.pgm").string()).pixels) EXPECT_EQ(px, 0);
    const Field frame = load_pgm16((root / "zero" / "frames" / "frame_010.pgm").string()).to_field();
    for (double v : frame.values()) EXPECT_EQ(v, 0.0);
    std::istringstream csv(slurp(root / "zero" / "energy.csv"));
    std::string line;
    while (std::getline(csv, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream row(line);
        std::string cell;
        while (std::getline(row, cell, ',')) EXPECT_EQ(std::stod(cell), 0.0);
    }
}

TEST_F(Cli, DecoupleIsByteIdenticalAcrossRuns) {
    for (const char* name : {"a", "b"}) {
        const CliRun r = run_cli({"decouple", "--config", config, "--target", "20,50", "--seed", "11", "--out", dir(name)});
        ASSERT_EQ(r.code, 0) << r.err;
    }
    std::size_t compared = 0;
    for (const auto& entry : fs::directory_iterator(root / "a")) {
        EXPECT_EQ(slurp(entry.path()), slurp(root / "b" / entry.path().filename())) << entry.path();
        ++compared;
    }
    EXPECT_GE(compared, 9u);

    const CliRun again = run_cli({"render", "--result", dir("a") + "/result.json", "--out", dir("r")});
    ASSERT_EQ(again.code, 0) << again.err;
    auto raster = [&](const fs::path& p) {
        const std::string bytes = slurp(p);
        return bytes.substr(bytes.find("\n36 74\n"));
    };
    EXPECT_EQ(raster(root / "r" / "composite.pgm"), raster(root / "a" / "composite.pgm"));
    auto body = [&](const fs::path& p) {
        const std::string text = slurp(p);
        return text.substr(text.find('\n'));
    };
    EXPECT_EQ(body(root / "r" / "target.csv"), body(root / "a" / "target.csv"));

    const json summary = json::parse(slurp(root / "a" / "summary.json"));
    EXPECT_NEAR(summary["best_ssim"].get<double>(), summary["rendered_ssim"].get<double>(), 1e-12);
    const CliRun seeded = run_cli({"decouple", "--config", config, "--target", "20,50", "--seed", "12", "--out", dir("c")});
    ASSERT_EQ(seeded.code, 0);
    EXPECT_NE(slurp(root / "c" / "result.json"), slurp(root / "a" / "result.json"));
}

TEST_F(Cli, OutOfBoardTargetFailsWithoutOutput) {
    for (const char* target : {"80,50", "-1,10", "20,147", "0,50"}) {
        const CliRun r = run_cli({"decouple", "--config", config, "--target", target, "--out", dir("bad")});
        EXPECT_NE(r.code, 0) << target;
        EXPECT_FALSE(fs::exists(root / "bad")) << target;
    }
    const CliRun e = run_cli({"energy", "--config", config, "--target", "100,100", "--out", dir("bad")});
    EXPECT_NE(e.code, 0);
    EXPECT_FALSE(fs::exists(root / "bad"));
}

TEST_F(Cli, LutBuildAndQuery) {
    const CliRun b = run_cli({"lut", "build", "--config", config, "--grid", "15:55:2,30:110:2", "--iterations", "60",
                           "--threads", "2", "--out", dir("lut")});
    ASSERT_EQ(b.code, 0) << b.err;
    const std::string lut = dir("lut") + "/lut.txt";
    const std::string used = dir("lut") + "/config.json";

    CliRun q = run_cli({"lut", "query", "--config", used, "--lut", lut, "--at", "55,30"});
    ASSERT_EQ(q.code, 0) << q.err;
    json j = json::parse(q.out);
    EXPECT_EQ(j["index"].get<int>(), 1);
    EXPECT_EQ(j["distance_mm"].get<double>(), 0.0);

    q = run_cli({"lut", "query", "--config", used, "--lut", lut, "--at", "20,100"});
    ASSERT_EQ(q.code, 0) << q.err;
    j = json::parse(q.out);
    EXPECT_EQ(j["index"].get<int>(), 2);
    EXPECT_DOUBLE_EQ(j["distance_mm"].get<double>(), std::hypot(5.0, 10.0));

    // a different seed changes the decoupling config, so the table is stale
    q = run_cli({"lut", "query", "--config", used, "--seed", "99", "--lut", lut, "--at", "20,100"});
    EXPECT_EQ(q.code, cli::kExitFailure);
    EXPECT_NE(q.err.find("fingerprint"), std::string::npos) << q.err;
}

TEST_F(Cli, EnergyFromResultMatchesComposite) {
    ASSERT_EQ(run_cli({"decouple", "--config", config, "--target", "30,70", "--out", dir("d")}).code, 0);
    const CliRun e = run_cli({"energy", "--result", dir("d") + "/result.json", "--out", dir("e")});
    ASSERT_EQ(e.code, 0) << e.err;
    EXPECT_EQ(slurp(root / "e" / "energy.pgm").substr(slurp(root / "e" / "energy.pgm").find("\n36 74\n")),
              slurp(root / "d" / "composite.pgm").substr(slurp(root / "d" / "composite.pgm").find("\n36 74\n")));
    EXPECT_NE(run_cli({"energy", "--config", config, "--out", dir("x")}).code, 0);
}

TEST_F(Cli, StreamToBoardOverLoopback) {
    ASSERT_EQ(run_cli({"decouple", "--config", config, "--target", "30,70", "--out", dir("d")}).code, 0);
    const std::string port = std::to_string(40000 + ::getpid() % 20000);
    auto board = std::async(std::launch::async, [&] {
        return run_cli({"board", "--config", config, "--port", port, "--timeout", "10", "--result",
                        dir("d") + "/result.json", "--out", dir("board")});
    });
    std::this_thread::sleep_for(std::chrono::milliseconds(200));
    const CliRun s = run_cli({"stream", "--config", config, "--port", port, "--duration", "0.5", "--result",
                           dir("d") + "/result.json"});
    ASSERT_EQ(s.code, 0) << s.err;
    const CliRun b = board.get();
    ASSERT_EQ(b.code, 0) << b.err;
    const json j = json::parse(slurp(root / "board" / "board.json"));
    EXPECT_GE(j["ssim_vs_result"].get<double>(), 0.999);
    EXPECT_EQ(j["gaps"].get<int>(), 0);
    EXPECT_TRUE(fs::exists(root / "board" / "received_phasors.json"));
}

TEST_F(Cli, ExitCodes) {
    EXPECT_EQ(run_cli({"--help"}).code, cli::kExitOk);
    EXPECT_EQ(run_cli({}).code, cli::kExitUsage);
    EXPECT_EQ(run_cli({"frobnicate"}).code, cli::kExitUsage);
    EXPECT_EQ(run_cli({"simulate", "--actuator", "6", "--out", dir("s")}).code, cli::kExitUsage);
    EXPECT_EQ(run_cli({"decouple", "--out", dir("s")}).code, cli::kExitUsage);
    EXPECT_EQ(run_cli({"simulate", "--config", dir("missing.json"), "--out", dir("s")}).code, cli::kExitConfig);
    std::ofstream(dir("bad.json")) << R"({"plate": {"colour": "red"}})";
    EXPECT_EQ(run_cli({"simulate", "--config", dir("bad.json"), "--out", dir("s")}).code, cli::kExitConfig);
    EXPECT_EQ(run_cli({"decouple", "--config", config, "--target", "abc", "--out", dir("s")}).code, cli::kExitConfig);
    EXPECT_EQ(run_cli({"render", "--result", dir("nothing.json"), "--out", dir("s")}).code, cli::kExitIo);
    EXPECT_EQ(run_cli({"simulate", "--config", config}).code, cli::kExitConfig);
    EXPECT_EQ(run_cli({"simulate", "--config", config, "--shape", "square", "--out", dir("s")}).code,
              cli::kExitFailure);

    ::setenv(kConfigEnvVar, config.c_str(), 1);
    const CliRun env = run_cli({"simulate", "--out", dir("env")});
    ::unsetenv(kConfigEnvVar);
    ASSERT_EQ(env.code, 0) << env.err;
    EXPECT_EQ(load_pgm16(dir("env") + "/energy.pgm").width, 36);
}

}  // namespace
}  // namespace platefocus
