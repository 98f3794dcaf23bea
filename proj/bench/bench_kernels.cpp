// Parallel kernels against their serial references. Thread count follows
// OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include "okr/kernel.hpp"
#include "okr/online_gp.hpp"
#include "okr/verify.hpp"

namespace {

okr::Dictionary make_dict(std::size_t n, std::size_t dim) {
    const okr::RegressionSet s = okr::random_stream(n, n, dim, 3.0);
    okr::Dictionary d;
    for (std::size_t i = 0; i < s.size(); ++i) d.push_back(s.inputs[i]);
    return d;
}

template <bool Serial>
void BM_Gram(benchmark::State& state) {
    const okr::KernelSpec spec;
    const okr::Dictionary d = make_dict(static_cast<std::size_t>(state.range(0)), 8);
    for (auto _ : state) {
        okr::Matrix K = Serial ? okr::serial::gram_matrix(spec, d) : okr::gram_matrix(spec, d);
        benchmark::DoNotOptimize(K.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

template <bool Serial>
void BM_CrossKernel(benchmark::State& state) {
    const okr::KernelSpec spec;
    const okr::Dictionary d = make_dict(static_cast<std::size_t>(state.range(0)), 8);
    const okr::RegressionSet probe = okr::random_stream(7, 1000, 8, 3.0);
    for (auto _ : state) {
        okr::Matrix K = Serial ? okr::serial::cross_kernel(spec, d, probe.inputs) : okr::cross_kernel(spec, d, probe.inputs);
        benchmark::DoNotOptimize(K.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0) * 1000);
}

template <bool Serial>
void BM_GpPredictBatch(benchmark::State& state) {
    okr::KernelSpec spec;
    spec.noise_variance = 0.1;
    const okr::RegressionSet data = okr::random_stream(3, static_cast<std::size_t>(state.range(0)), 8, 3.0);
    okr::GpState gp = okr::gp_init(spec);
    for (std::size_t i = 0; i < data.size(); ++i) okr::gp_update(gp, data.inputs[i], data.targets[i]);
    const okr::RegressionSet probe = okr::random_stream(9, 1000, 8, 3.0);
    for (auto _ : state) {
        auto p = Serial ? okr::serial::gp_predict_batch(gp, probe.inputs) : okr::gp_predict_batch(gp, probe.inputs);
        benchmark::DoNotOptimize(p.data());
    }
    state.SetItemsProcessed(state.iterations() * 1000);
}

}  // namespace

BENCHMARK(BM_Gram<true>)->Name("gram/serial")->Arg(256)->Arg(1024);
BENCHMARK(BM_Gram<false>)->Name("gram/parallel")->Arg(256)->Arg(1024);
BENCHMARK(BM_CrossKernel<true>)->Name("cross_kernel/serial")->Arg(256)->Arg(1024);
BENCHMARK(BM_CrossKernel<false>)->Name("cross_kernel/parallel")->Arg(256)->Arg(1024);
BENCHMARK(BM_GpPredictBatch<true>)->Name("gp_predict_batch/serial")->Arg(200)->Arg(800);
BENCHMARK(BM_GpPredictBatch<false>)->Name("gp_predict_batch/parallel")->Arg(200)->Arg(800);

BENCHMARK_MAIN();
