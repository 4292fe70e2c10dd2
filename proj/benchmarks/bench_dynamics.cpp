#include <benchmark/benchmark.h>

#include "wgscatter/calibration.hpp"
#include "wgscatter/dynamics.hpp"
#include "wgscatter/observables.hpp"
#include "wgscatter/wavepackets.hpp"

namespace {

using namespace wgscatter;

struct Setup {
    Grid grid;
    PhysicalParams params;
    TwoExcitationState state;

    explicit Setup(std::size_t n) : grid(Grid::build(n, 10.0)) {
        params.coupling = analytic_coupling(1.0);
        PulseSpec p;
        state = build_two_photon_state({p, p, CorrelationWidth::uncorrelated()}, grid, params);
    }
};

void BM_ReferenceRhs(benchmark::State& st) {
    Setup s(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(rhs_two_excitation(s.state, s.grid, s.params));
    st.SetItemsProcessed(st.iterations() * static_cast<long>(s.grid.modes() * s.grid.modes()));
}
BENCHMARK(BM_ReferenceRhs)->Arg(101)->Arg(201)->Arg(401)->Unit(benchmark::kMillisecond);

void BM_Rk4Step(benchmark::State& st) {
    Setup s(static_cast<std::size_t>(st.range(0)));
    TwoExcitationStepper stepper(s.grid, s.params);
    const double dt = default_time_step(s.grid, s.params);
    for (auto _ : st) {
        stepper.step(s.state, dt);
        benchmark::ClobberMemory();
    }
    st.SetItemsProcessed(st.iterations() * static_cast<long>(s.grid.modes() * s.grid.modes()));
}
BENCHMARK(BM_Rk4Step)->Arg(101)->Arg(201)->Arg(401)->Unit(benchmark::kMillisecond);

void BM_SingleExcitationStep(benchmark::State& st) {
    const Grid grid = Grid::build(static_cast<std::size_t>(st.range(0)), 10.0);
    PhysicalParams params;
    params.coupling = analytic_coupling(1.0);
    SingleExcitationStepper stepper(grid, params);
    auto s = build_excited_emitter_state(grid);
    for (auto _ : st) {
        stepper.step(s, 0.01);
        benchmark::ClobberMemory();
    }
}
BENCHMARK(BM_SingleExcitationStep)->Arg(401)->Arg(4001);

void BM_PhotonDensity(benchmark::State& st) {
    Setup s(static_cast<std::size_t>(st.range(0)));
    ZGrid zg;
    for (auto _ : st) benchmark::DoNotOptimize(photon_density(s.state, s.grid, zg));
}
BENCHMARK(BM_PhotonDensity)->Arg(201)->Arg(401)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
