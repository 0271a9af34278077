#include <benchmark/benchmark.h>

#include "kasner/diagnostics.hpp"

namespace {

using namespace kasner;

FieldState bench_state(int k_max, GaugeTag tag) {
    InitialDataOptions opt;
    opt.seed = 42;
    return make_initial_data(KasnerBackground::from_sigma(0.05), tag,
                             k_max, opt);
}

void BM_RhsEval(benchmark::State& state) {
    const FieldState st =
        bench_state(static_cast<int>(state.range(0)), GaugeTag::cmc());
    const GaugeSystem sys(st.bg, st.gauge);
    const BgAt b = BgAt::at(st.bg, 0.5);
    for (auto _ : state) {
        for (int idx = 0; idx < st.lattice.size(); ++idx) {
            const ModeState d = sys.rhs_mode(
                b, st.lattice.at(idx),
                st.modes[static_cast<size_t>(idx)]);
            benchmark::DoNotOptimize(d);
        }
    }
    state.SetItemsProcessed(state.iterations() * st.lattice.size());
}
BENCHMARK(BM_RhsEval)->Arg(2)->Arg(4)->Arg(8);

void BM_SobolevNorm(benchmark::State& state) {
    const FieldState st =
        bench_state(static_cast<int>(state.range(0)), GaugeTag::cmc());
    for (auto _ : state) {
        benchmark::DoNotOptimize(sobolev_norm(st, Field::Kmix, 3));
    }
}
BENCHMARK(BM_SobolevNorm)->Arg(2)->Arg(4)->Arg(8);

void BM_Energies(benchmark::State& state) {
    const FieldState st =
        bench_state(static_cast<int>(state.range(0)), GaugeTag::cmc());
    for (auto _ : state) {
        benchmark::DoNotOptimize(energies(st, 0.1, 3));
    }
}
BENCHMARK(BM_Energies)->Arg(2)->Arg(4)->Arg(8);

} // namespace

BENCHMARK_MAIN();
