// Copyright 2026 The fdxbl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------
//
// Serial reference vs batched / OpenMP kernels.
//
//   Unroll/Reference    per-sample unroll (GEMV per slot), the test oracle
//   Unroll/Batched      one GEMM per layer per slot over the whole batch
//   Gradient/Batched    forward plus backpropagation through time
//   Eval/Serial         Monte Carlo evaluation loop, one thread
//   Eval/Parallel       same loop under OpenMP (bit-identical rows)

#include "fdxbl/batch_kernel.hpp"
#include "fdxbl/harness.hpp"

#include <benchmark/benchmark.h>

using namespace fdxbl;

namespace {

struct Fixture {
    LearnerParams params;
    std::vector<ChannelRealization> batch;
    BatchNoise noise;

    Fixture(int horizon, int hidden, int width, int batch_size)
    {
        LearnerConfig c;
        c.horizon = horizon;
        c.hidden_dim = hidden;
        c.dnn_hidden_widths = {width, width};
        Rng rng = make_stream(1);
        params = LearnerParams::initialize(c, rng);
        const ScenarioSampler s(ArraySpec{}, LinkBudget{}, InrNormalization::reference_capped);
        for (int i = 0; i < batch_size; ++i)
            batch.push_back(s.sample(7.0, rng));
        noise = draw_batch_noise(batch_size, horizon, rng);
    }
};

const NoiseModel kNoise{0.4};

void BM_UnrollReference(benchmark::State &st)
{
    Fixture fx(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)),
               static_cast<int>(st.range(2)), 128);
    const int horizon = fx.params.config().horizon;
    for (auto _ : st) {
        double total = 0.0;
        for (std::size_t i = 0; i < fx.batch.size(); ++i)
            total += unroll_with(fx.params, fx.batch[i], kNoise,
                                 std::span<const SlotNoise>(fx.noise).subspan(i * horizon, horizon))
                         .achieved.r_sum;
        benchmark::DoNotOptimize(total);
    }
    st.SetItemsProcessed(st.iterations() * 128);
}

void BM_UnrollBatched(benchmark::State &st)
{
    Fixture fx(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)),
               static_cast<int>(st.range(2)), 128);
    for (auto _ : st)
        benchmark::DoNotOptimize(batch_forward(fx.params, fx.batch, kNoise, fx.noise).loss);
    st.SetItemsProcessed(st.iterations() * 128);
}

void BM_GradientBatched(benchmark::State &st)
{
    Fixture fx(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)),
               static_cast<int>(st.range(2)), 128);
    RVector grad;
    for (auto _ : st)
        benchmark::DoNotOptimize(
            batch_loss_and_gradient(fx.params, fx.batch, kNoise, fx.noise, grad).loss);
    st.SetItemsProcessed(st.iterations() * 128);
}

template <Execution exec>
void BM_Eval(benchmark::State &st)
{
    Fixture fx(10, 64, 128, 256);
    const MethodSpec m = st.range(0) == 0 ? MethodSpec{MethodKind::random_probe, 10, 0, nullptr}
                                          : MethodSpec{MethodKind::learner, 10, 0, &fx.params};
    for (auto _ : st)
        benchmark::DoNotOptimize(evaluate_method(m, fx.batch, kNoise, 3, exec).size());
    st.SetItemsProcessed(st.iterations() * static_cast<long>(fx.batch.size()));
    st.SetLabel(m.tag());
}

} // namespace

// Args: horizon, hidden, dense width
BENCHMARK(BM_UnrollReference)->Args({3, 64, 128})->Args({10, 128, 256})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_UnrollBatched)->Args({3, 64, 128})->Args({10, 128, 256})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GradientBatched)->Args({3, 64, 128})->Args({10, 128, 256})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Eval<Execution::serial>)->Name("BM_EvalSerial")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Eval<Execution::parallel>)->Name("BM_EvalParallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
