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

#include "diffrestore/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

#include "diffrestore/errors.hpp"
#include "diffrestore/guidance.hpp"
#include "diffrestore/rng.hpp"

namespace diffrestore {

namespace {

// Noise-stream layout: stream 0 forms x_T, stream t the transition out of
// step t. Part of the reproducibility contract together with
// kNoiseStreamName.
constexpr uint64_t kInitStream = 0;

double tensor_mean(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

void check_finite(const ImageTensor& x, int t, const char* what) {
    if (!all_finite(x)) {
        throw DivergenceError("sampling diverged at step " + std::to_string(t) + " (" + what +
                                  " went non-finite)",
                              t);
    }
}

}  // namespace

RestorationRun restore(const ImageTensor& y, const NoisePredictor& predictor,
                       const SamplerConfig& config,
                       const std::optional<ImageTensor>& reference) {
    if (!all_finite(y)) {
        throw DimensionError("restore: y contains non-finite values");
    }
    if (config.trace_every < 1) {
        throw ConfigError("restore: trace_every must be >= 1");
    }
    const DiffusionSchedule sched =
        make_linear_schedule(config.steps, config.beta_start, config.beta_end);
    const int T = sched.steps();

    DegradationModel model = init_model(y.channels, y.height, y.width, config.kernel_size,
                                        config.kernel_init, config.constraint_mode);

    const NoiseStream stream(config.seed);
    ImageTensor x_t(y.channels, y.height, y.width, 0.0);
    {
        const ImageTensor eps = stream.normal_field(y.channels, y.height, y.width, kInitStream);
        switch (config.warm_start) {
            case WarmStart::kNone:
                x_t = eps;
                break;
            case WarmStart::kFromY:
                x_t = forward_sample(sched, y, T, eps);
                break;
            case WarmStart::kFromImage:
                if (!config.warm_image.has_value()) {
                    throw ConfigError("restore: warm_start=from_image needs a warm image");
                }
                x_t = forward_sample(sched, *config.warm_image, T, eps);
                break;
        }
    }

    GuidanceState gstate;
    gstate.s_init = config.s_init;
    gstate.s_min = config.s_min;
    gstate.s_max = config.s_max;
    gstate.prev_scale = 0.0;

    RestorationRun run;
    run.config = config;
    run.traces.reserve(static_cast<size_t>(T / config.trace_every) + 1);

    for (int t = T; t >= 1; --t) {
        const ImageTensor eps_hat = predictor.predict(x_t, t, sched);
        check_finite(eps_hat, t, "noise prediction");
        ImageTensor x0_hat = predict_x0(sched, x_t, eps_hat, t);
        check_finite(x0_hat, t, "x0 estimate");

        const DegradationGrads grads = loss_and_grads(model, x0_hat, y);
        if (!std::isfinite(grads.loss) || !all_finite(grads.grad_x)) {
            throw DivergenceError(
                "sampling diverged at step " + std::to_string(t) + " (degradation loss)", t);
        }

        const bool skip_guidance = grads.loss < kGuidanceLossFloor;
        double s;
        if (config.fixed_scale) {
            s = std::clamp(config.s_init, config.s_min, config.s_max);
        } else if (skip_guidance) {
            s = gstate.prev_mean.has_value()
                    ? gstate.prev_scale
                    : std::clamp(config.s_init, config.s_min, config.s_max);
        } else {
            const ImageTensor grad_xt = grad_wrt_xt(grads.grad_x, sched, t);
            s = adaptive_scale(gstate, x_t, grad_xt, grads.loss);
        }

        if (!skip_guidance) {
            x0_hat = guidance_shift(x0_hat, grads.grad_x, s, sched, t);
            check_finite(x0_hat, t, "guided x0 estimate");
        }

        auto [mean, var] = posterior_params(sched, x0_hat, x_t, t);
        check_finite(mean, t, "posterior mean");

        if (t == 1) {
            x_t = mean;
        } else {
            const ImageTensor z =
                stream.normal_field(y.channels, y.height, y.width, static_cast<uint64_t>(t));
            const double sd = std::sqrt(var);
            ImageTensor next = mean;
            for (size_t i = 0; i < next.data.size(); ++i) next.data[i] += sd * z.data[i];
            x_t = std::move(next);
            check_finite(x_t, t, "sampled state");
        }

        if (!config.fixed_kernel) {
            model = update_params(model, grads.grad_kernel, grads.grad_mask,
                                  config.learning_rate);
            if (!all_finite(model.kernel) || !all_finite(model.mask)) {
                throw DivergenceError(
                    "sampling diverged at step " + std::to_string(t) + " (parameter update)", t);
            }
        }

        if ((T - t) % config.trace_every == 0 || t == 1) {
            StepTrace trace;
            trace.t = t;
            trace.loss = grads.loss;
            trace.s = s;
            trace.kernel_mean = tensor_mean(model.kernel.weights);
            trace.mask_mean = tensor_mean(model.mask.data);
            if (reference.has_value()) {
                trace.ref_mse = mse(x0_hat, *reference);
            }
            run.traces.push_back(std::move(trace));
        }

        gstate.prev_mean = std::move(mean);
        gstate.prev_scale = s;
    }

    run.output = std::move(x_t);
    run.model = std::move(model);
    return run;
}

std::vector<BatchResult> restore_batch(const std::vector<RestoreInput>& inputs,
                                       const NoisePredictor& predictor,
                                       const SamplerConfig& config, int parallelism) {
    std::vector<BatchResult> results(inputs.size());
    if (inputs.empty()) return results;

    const int workers =
        std::max(1, std::min<int>(parallelism, static_cast<int>(inputs.size())));

    auto run_one = [&](size_t i) {
        SamplerConfig per_input = config;
        per_input.seed = config.seed + static_cast<uint64_t>(i);
        try {
            results[i].run = restore(inputs[i].y, predictor, per_input, inputs[i].reference);
        } catch (const DivergenceError& e) {
            results[i].error = e.what();
            results[i].diverged_step = e.step();
        } catch (const std::exception& e) {
            results[i].error = e.what();
        }
    };

    if (workers == 1) {
        for (size_t i = 0; i < inputs.size(); ++i) run_one(i);
        return results;
    }

    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            while (true) {
                const size_t i = next.fetch_add(1);
                if (i >= inputs.size()) break;
                run_one(i);
            }
        });
    }
    for (auto& th : pool) th.join();
    return results;
}

}  // namespace diffrestore
