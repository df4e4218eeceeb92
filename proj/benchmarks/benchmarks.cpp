#include <benchmark/benchmark.h>

#include "gravphase/analysis.hpp"
#include "gravphase/kinematics.hpp"
#include "gravphase/phase.hpp"
#include "gravphase/qrf.hpp"
#include "gravphase/sources.hpp"

namespace {

using namespace gravphase;

const Constants c{};
constexpr double kPi = 3.14159265358979323846;

SourceModel bench_ring() {
    RingArc ring;
    ring.mass = 1.25;
    ring.radius = 0.082;
    ring.center = {0.012, 0.0, 0.0};
    ring.arc_span = kPi;
    ring.arc_phase = kPi / 2.0;
    return SourceModel::ring(ring);
}

InterferometerSpec bench_spec() {
    InterferometerSpec spec;
    spec.m = c.m_rb87;
    spec.M = 1.25;
    spec.k = 52.0 * kPi / c.lambda_laser;
    spec.T = InterferometerSpec::pulse_time_for_separation(0.25, spec.m, spec.k, c);
    spec.xs0 = {0.0, 0.0, 0.085};
    spec.a_src = {0.0, 0.0, 9.80665};
    return spec;
}

void BM_RingPotential(benchmark::State& state) {
    const SourceModel ring = bench_ring();
    const Vec3 x{0.0, 0.0, 0.04};
    for (auto _ : state) benchmark::DoNotOptimize(potential_at(ring, x, c));
}
BENCHMARK(BM_RingPotential);

void BM_RingField(benchmark::State& state) {
    const SourceModel ring = bench_ring();
    const Vec3 x{0.0, 0.0, 0.04};
    for (auto _ : state) benchmark::DoNotOptimize(field_at(ring, x, c));
}
BENCHMARK(BM_RingField);

void BM_PointPairEnergy(benchmark::State& state) {
    const auto a = SourceModel::point(c.m_rb87, {0.0, 0.0, 0.0});
    const auto b = SourceModel::point(1.25, {0.0, 0.0, 0.07});
    for (auto _ : state) benchmark::DoNotOptimize(interaction_energy(a, b, {}, c));
}
BENCHMARK(BM_PointPairEnergy);

void BM_QuantumPhase(benchmark::State& state) {
    const InterferometerSpec spec = bench_spec();
    const auto [x1, x2] = mach_zehnder_arms(spec, c);
    const Trajectory xs = parabolic_source(spec);
    const SourceModel ring = bench_ring();
    const TimeGrid grid(0.0, 2.0 * spec.T, static_cast<int>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(
            phase_potential_integral(x1, x2, xs, ring, spec.m, grid, c));
}
BENCHMARK(BM_QuantumPhase)->Arg(401)->Arg(2001);

void BM_SemiclassicalEvolve(benchmark::State& state) {
    const InterferometerSpec spec = bench_spec();
    const SourceModel ring = bench_ring();
    for (auto _ : state)
        benchmark::DoNotOptimize(
            semiclassical_evolve(spec, ring, static_cast<int>(state.range(0)), c));
}
BENCHMARK(BM_SemiclassicalEvolve)->Arg(2000)->Arg(8000);

void BM_QrfTransform(benchmark::State& state) {
    const InterferometerSpec spec = bench_spec();
    const auto [x1, x2] = mach_zehnder_arms(spec, c);
    const Trajectory xs = parabolic_source(spec);
    BranchState branch_state;
    branch_state.frame = "D";
    branch_state.particles = {{"A", spec.m, true}, {"B", spec.M, true}, {"D", 1.0, false}};
    Branch b1, b2;
    b1.amplitude = b2.amplitude = {1.0 / std::sqrt(2.0), 0.0};
    b1.paths.emplace("A", x1);
    b1.paths.emplace("B", xs);
    b2.paths.emplace("A", x2);
    b2.paths.emplace("B", xs);
    branch_state.branches = {b1, b2};
    for (auto _ : state)
        benchmark::DoNotOptimize(qrf_transform(branch_state, {"D", "A"}));
}
BENCHMARK(BM_QrfTransform);

void BM_WeightedFit(benchmark::State& state) {
    std::vector<PhaseDataPoint> data;
    for (int i = 0; i < 64; ++i)
        data.push_back({0.1 + 0.8 * i / 63.0, -0.2 + 0.01 * (i % 7), 0.02});
    for (auto _ : state) benchmark::DoNotOptimize(weighted_linear_fit(data));
}
BENCHMARK(BM_WeightedFit);

}  // namespace

BENCHMARK_MAIN();
