// Serial reference against the OpenMP path for the sampled kernels. The
// argument selects the policy: 0 serial, 1 parallel. Results are identical by
// construction; only the time differs.

#include <benchmark/benchmark.h>

#include <numbers>

#include "contactkit/catalog.hpp"
#include "contactkit/quadrature.hpp"

using namespace contactkit;

namespace {

Execution policy(const benchmark::State& s) { return s.range(0) ? Execution::Parallel : Execution::Serial; }

void ContactCondition(benchmark::State& state) {
    const ExampleDescriptor d = describe("darboux(3)");
    for (auto _ : state) benchmark::DoNotOptimize(is_contact(d.contact.eta(), 20000, 1, policy(state)).min_volume);
}

void ReebChecks(benchmark::State& state) {
    const ExampleDescriptor d = describe("hopf_s3");
    for (auto _ : state) benchmark::DoNotOptimize(reeb_checks(d.contact, 2000, 1, policy(state)));
}

void PeriodSuite(benchmark::State& state) {
    const ExampleDescriptor d = describe("hopf_s3");
    PeriodOptions po;
    po.horizon = 1.5 * 2 * std::numbers::pi;
    for (auto _ : state) benchmark::DoNotOptimize(period_constancy_suite(d.contact, 8, 1, po, policy(state)).mean);
}

void Integrality(benchmark::State& state) {
    const ExampleDescriptor d = describe("hopf_s3");
    const KnownReduction& r = *d.reduction;
    for (auto _ : state)
        benchmark::DoNotOptimize(integrality_check(*r.omega, *r.surface, 2 * std::numbers::pi, 1e-6, {256, 256}, false,
                                                   policy(state))
                                     .integral);
}

void TensorPairing(benchmark::State& state) {
    const PrincipalContactData d = principal_data("darboux-data");
    const EquivariantFunction F = base_section(
        [](std::span<const double> x) { return std::exp(-0.5 * (x[0] * x[0] + x[1] * x[1])) * Complex(1.0, x[0]); },
        d);
    const TensorSection s = tensor_section(F, d, F, d);
    const std::vector<Interval> box{{-5, 5}, {-5, 5}};
    const std::vector<int> grid{16, 16, 16, 16};
    for (auto _ : state) benchmark::DoNotOptimize(tensor_pairing(s, s, d, d, box, box, grid, policy(state)));
}

}  // namespace

BENCHMARK(ContactCondition)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(ReebChecks)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(PeriodSuite)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(Integrality)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(TensorPairing)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
