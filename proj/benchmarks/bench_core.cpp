// bench_core.cpp — hot paths: Liouvillian, propagation, eigenspace detection, xi

#include "adfs/adiabatic_monitor.hpp"
#include "adfs/dfs_analysis.hpp"
#include "adfs/lindblad_integrator.hpp"
#include "adfs/squeezed_qubit.hpp"

#include <benchmark/benchmark.h>

#include <vector>

using namespace adfs;

namespace {

model::SqueezeSchedule ramp() { return model::SqueezeSchedule{0.3, 0.2, 0.1, 0.2, 1.0, 0.0}; }

void BM_LiouvillianApply(benchmark::State& state) {
    const auto m = qubit::make_model(ramp(), model::ControlMode::engineered, 10.0);
    const auto ops = model::evaluate(m, 1.0);
    const Matrix rho = lindblad::DensityMatrix::maximally_mixed(2).data();
    for (auto _ : state) benchmark::DoNotOptimize(lindblad::liouvillian_apply(ops, rho));
}
BENCHMARK(BM_LiouvillianApply);

void BM_Propagate(benchmark::State& state) {
    const auto m = qubit::make_model(ramp(), model::ControlMode::engineered, 10.0);
    const std::vector<double> grid{0.0, 10.0};
    lindblad::PropagateOptions o;
    o.dt_max = 1e-3;
    for (auto _ : state) {
        auto rec = lindblad::propagate(m, lindblad::DensityMatrix::maximally_mixed(2), grid, o);
        benchmark::DoNotOptimize(rec.states.back());
    }
    state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_Propagate)->Unit(benchmark::kMillisecond);

void BM_EigenspaceDetection(benchmark::State& state) {
    const auto m = qubit::make_model(ramp(), model::ControlMode::engineered, 10.0);
    const auto ops = model::evaluate(m, 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(dfs::common_degenerate_eigenspace(ops));
}
BENCHMARK(BM_EigenspaceDetection);

void BM_XiState(benchmark::State& state) {
    const dfs::DfsPath path(qubit::make_model(ramp(), model::ControlMode::engineered, 10.0));
    const auto method = state.range(0) ? adiabatic::DerivativeMethod::analytic
                                       : adiabatic::DerivativeMethod::finite_difference;
    for (auto _ : state) benchmark::DoNotOptimize(adiabatic::xi_state(path, 2.0, method).value);
}
BENCHMARK(BM_XiState)->Arg(1)->Arg(0);

}  // namespace

BENCHMARK_MAIN();
