/*
 * Copyright 2026 The diffrestore Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <benchmark/benchmark.h>

#include <cmath>

#include "diffrestore/degradation.hpp"
#include "diffrestore/metrics.hpp"
#include "diffrestore/prior.hpp"
#include "diffrestore/rng.hpp"
#include "diffrestore/sampler.hpp"
#include "diffrestore/synth.hpp"

using namespace diffrestore;

namespace {

ImageTensor bench_image(int c, int side, uint64_t seed) {
    const NoiseStream stream(seed);
    ImageTensor img(c, side, side, 0.0);
    for (size_t i = 0; i < img.data.size(); ++i) {
        img.data[i] = 0.9 * (2.0 * stream.uniform(0, i) - 1.0);
    }
    return img;
}

KernelBank bench_kernel(int c, int k, uint64_t seed) {
    const NoiseStream stream(seed);
    KernelBank bank(c, c, k, 0.0);
    for (size_t i = 0; i < bank.weights.size(); ++i) {
        bank.weights[i] = stream.uniform(1, i) - 0.5;
    }
    return bank;
}

}  // namespace

static void BM_Conv2d(benchmark::State& state) {
    const int side = static_cast<int>(state.range(0));
    const ImageTensor x = bench_image(3, side, 1);
    const KernelBank k = bench_kernel(3, 5, 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(conv2d(x, k));
    }
    state.SetItemsProcessed(state.iterations() * x.size());
}
BENCHMARK(BM_Conv2d)->Arg(16)->Arg(32)->Arg(64);

static void BM_Conv2dAdjoint(benchmark::State& state) {
    const int side = static_cast<int>(state.range(0));
    const ImageTensor g = bench_image(3, side, 3);
    const KernelBank k = bench_kernel(3, 5, 4);
    for (auto _ : state) {
        benchmark::DoNotOptimize(conv2d_adjoint_input(g, k));
    }
    state.SetItemsProcessed(state.iterations() * g.size());
}
BENCHMARK(BM_Conv2dAdjoint)->Arg(16)->Arg(32)->Arg(64);

static void BM_LossAndGrads(benchmark::State& state) {
    const int side = static_cast<int>(state.range(0));
    DegradationModel model = init_model(3, side, side, 5, KernelInit::kSmoothedIdentity);
    const ImageTensor x = bench_image(3, side, 5);
    const ImageTensor y = bench_image(3, side, 6);
    for (auto _ : state) {
        benchmark::DoNotOptimize(loss_and_grads(model, x, y));
    }
    state.SetItemsProcessed(state.iterations() * x.size());
}
BENCHMARK(BM_LossAndGrads)->Arg(16)->Arg(32);

static void BM_GmmPredict(benchmark::State& state) {
    const int components = static_cast<int>(state.range(0));
    const int side = 32;
    std::vector<GaussianComponent> comps;
    for (int j = 0; j < components; ++j) {
        comps.push_back({1.0 / components, bench_image(3, side, 10 + static_cast<uint64_t>(j)),
                         0.01});
    }
    const GaussianMixturePrior prior(comps);
    const DiffusionSchedule sched = make_linear_schedule(1000, 1e-4, 0.02);
    const ImageTensor x_t = bench_image(3, side, 7);
    int t = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(prior.predict(x_t, t, sched));
        t = t % 1000 + 1;
    }
}
BENCHMARK(BM_GmmPredict)->Arg(1)->Arg(8)->Arg(20);

static void BM_Restore(benchmark::State& state) {
    const int steps = static_cast<int>(state.range(0));
    const ImageTensor clean = bench_image(3, 16, 20);
    GaussianMixturePrior prior({{1.0, clean, 1e-4}});
    const ImageTensor y = degrade(make_low_light(0.35), clean);
    SamplerConfig config;
    config.steps = steps;
    config.kernel_size = 5;
    config.learning_rate = 0.1;
    config.s_init = 150.0;
    config.s_min = 15.0;
    config.s_max = 150.0;
    config.warm_start = WarmStart::kFromY;
    for (auto _ : state) {
        benchmark::DoNotOptimize(restore(y, prior, config));
    }
    state.SetItemsProcessed(state.iterations() * steps);
}
BENCHMARK(BM_Restore)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

static void BM_Ssim(benchmark::State& state) {
    const int side = static_cast<int>(state.range(0));
    const ImageTensor a = bench_image(3, side, 30);
    const ImageTensor b = bench_image(3, side, 31);
    for (auto _ : state) {
        benchmark::DoNotOptimize(ssim(a, b));
    }
}
BENCHMARK(BM_Ssim)->Arg(32)->Arg(64);

static void BM_Loe(benchmark::State& state) {
    const int side = static_cast<int>(state.range(0));
    const ImageTensor a = bench_image(3, side, 32);
    const ImageTensor b = bench_image(3, side, 33);
    for (auto _ : state) {
        benchmark::DoNotOptimize(loe(a, b));
    }
}
BENCHMARK(BM_Loe)->Arg(32)->Arg(64);

BENCHMARK_MAIN();
