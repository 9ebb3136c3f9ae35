#include <benchmark/benchmark.h>

#include "platefocus/decoupler.hpp"
#include "platefocus/drive_link.hpp"
#include "platefocus/ssim.hpp"

namespace {

using namespace platefocus;

PlateSpec grid(int nx, int ny) {
    PlateSpec s;
    s.grid_nx = nx;
    s.grid_ny = ny;
    return s;
}

struct Fixture {
    explicit Fixture(int nx, int ny)
        : spec(grid(nx, ny)),
          basis(build_modal_basis(spec, ActuatorLayout::quincunx(spec), kDefaultDriveFrequency)),
          cache(basis),
          target(target_energy(basis, {20e-3, 50e-3})) {}

    PlateSpec spec;
    ModalBasis basis;
    ResponseCache cache;
    EnergyImage target;
};

const Fixture& fixture(int scale) {
    static const Fixture fast(90, 184);
    static const Fixture full(179, 367);
    return scale ? full : fast;
}

void BM_PhasorEnergy(benchmark::State& state) {
    const Fixture& f = fixture(static_cast<int>(state.range(0)));
    Rng rng(1);
    const GainSpectrum g = random_gains(rng);
    for (auto _ : state) benchmark::DoNotOptimize(phasor_energy(f.cache, g));
}
BENCHMARK(BM_PhasorEnergy)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

void BM_Ssim(benchmark::State& state) {
    const Fixture& f = fixture(static_cast<int>(state.range(0)));
    const SsimReference ref(f.target.values, SsimParams{});
    Rng rng(3);
    const EnergyImage probe = phasor_energy(f.cache, random_gains(rng));
    for (auto _ : state) benchmark::DoNotOptimize(ref.score(probe.values));
}
BENCHMARK(BM_Ssim)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

void BM_AnnealStep(benchmark::State& state) {
    const Fixture& f = fixture(static_cast<int>(state.range(0)));
    DecoupleObjective objective(f.cache, f.target, SsimParams{});
    AnnealConfig cfg;
    Rng rng(2);
    GainSpectrum g = random_gains(rng);
    for (auto _ : state) {
        g = perturb(g, cfg, rng);
        benchmark::DoNotOptimize(objective.score(g));
    }
}
BENCHMARK(BM_AnnealStep)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

void BM_PacketCodec(benchmark::State& state) {
    ActuatorPhasor p;
    p.amplitude = {1, 2, 3, 4, 5};
    const DrivePacket packet = make_drive_packet(p, kDefaultDriveFrequency, 42);
    for (auto _ : state) benchmark::DoNotOptimize(decode_packet(encode_packet(packet)));
}
BENCHMARK(BM_PacketCodec);

}  // namespace

BENCHMARK_MAIN();
