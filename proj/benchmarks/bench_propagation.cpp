#include <benchmark/benchmark.h>

#include "spinqc/fidelity.hpp"

using namespace spinqc;

namespace {

ChainParams chain(int L) {
    ChainParams p;
    p.L = L;
    p.J = 1.945;
    return p;
}

void BM_ExactProtocol(benchmark::State& state) {
    const Protocol prot = build_entanglement_protocol(chain(static_cast<int>(state.range(0))), 0.118);
    for (auto _ : state) benchmark::DoNotOptimize(run_protocol(ground_state(prot.params.L), prot));
}
BENCHMARK(BM_ExactProtocol)->Arg(6)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_PulsePropagatorBuild(benchmark::State& state) {
    const ChainParams p = chain(static_cast<int>(state.range(0)));
    const Protocol prot = build_entanglement_protocol(p, 0.118);
    for (auto _ : state) benchmark::DoNotOptimize(PulsePropagator(build_rot_ham(p, prot.pulses[1])));
}
BENCHMARK(BM_PulsePropagatorBuild)->Arg(6)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_PertProtocol(benchmark::State& state) {
    const Protocol prot = build_entanglement_protocol(chain(static_cast<int>(state.range(0))), 0.118);
    PertOptions o;
    o.order = state.range(1) ? PertOrder::block_pt1 : PertOrder::block;
    for (auto _ : state) benchmark::DoNotOptimize(run_protocol_pert(ground_state(prot.params.L), prot, o));
}
BENCHMARK(BM_PertProtocol)
    ->ArgsProduct({{6, 10, 14, 18}, {0, 1}})
    ->ArgNames({"L", "pt1"})
    ->Unit(benchmark::kMillisecond);

void BM_PartitionBlocks(benchmark::State& state) {
    const ChainParams p = chain(static_cast<int>(state.range(0)));
    const Protocol prot = build_entanglement_protocol(p, 0.118);
    for (auto _ : state) benchmark::DoNotOptimize(partition_blocks(prot.pulses[3], p));
}
BENCHMARK(BM_PartitionBlocks)->Arg(6)->Arg(10)->Arg(14)->Unit(benchmark::kMicrosecond);

void BM_IdealState(benchmark::State& state) {
    const Protocol prot = build_entanglement_protocol(chain(static_cast<int>(state.range(0))), 0.118);
    for (auto _ : state) benchmark::DoNotOptimize(build_ideal_state(prot));
}
BENCHMARK(BM_IdealState)->Arg(6)->Arg(10)->Unit(benchmark::kMicrosecond);

}  // namespace
BENCHMARK_MAIN();
