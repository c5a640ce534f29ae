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

#ifndef DIFFRESTORE_SAMPLER_HPP
#define DIFFRESTORE_SAMPLER_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "diffrestore/degradation.hpp"
#include "diffrestore/prior.hpp"
#include "diffrestore/schedule.hpp"
#include "diffrestore/tensor.hpp"

namespace diffrestore {

enum class WarmStart {
    kNone,       // x_T ~ N(0, I)
    kFromY,      // x_T = forward_sample(y, T, eps)
    kFromImage,  // x_T = forward_sample(warm_image, T, eps)
};

struct SamplerConfig {
    int steps = 1000;
    double beta_start = 1e-4;
    double beta_end = 0.02;

    int kernel_size = 5;
    ConstraintMode constraint_mode = ConstraintMode::kUnconstrained;
    KernelInit kernel_init = KernelInit::kIdentity;
    double learning_rate = 1e-2;

    double s_init = 2000.0;
    double s_min = 1.0;
    double s_max = 1e6;
    bool fixed_scale = false;   // ablation: keep s at clamp(s_init) every step
    bool fixed_kernel = false;  // ablation: never update kernel/mask

    WarmStart warm_start = WarmStart::kNone;
    std::optional<ImageTensor> warm_image;  // required for kFromImage

    uint64_t seed = 0;
    int trace_every = 1;
};

/// One traced step of a restoration run.
struct StepTrace {
    int t = 0;
    double loss = 0.0;
    double s = 0.0;
    double kernel_mean = 0.0;
    double mask_mean = 0.0;
    std::optional<double> ref_mse;  // x0 estimate vs ground truth, when known
};

struct RestorationRun {
    SamplerConfig config;
    ImageTensor output;
    DegradationModel model;
    std::vector<StepTrace> traces;
};

/// When loss drops below this, the guidance shift is skipped for the step
/// instead of dividing by ~0 in the scale update.
inline constexpr double kGuidanceLossFloor = 1e-12;

/// Runs the guided reverse loop for t = T..1:
/// predict noise, estimate x0, compute degradation loss/gradients, update
/// the guidance scale, shift the x0 estimate, sample x_{t-1} from the
/// posterior Gaussian, then gradient-step the degradation parameters with
/// the pre-shift gradients. Throws DivergenceError naming the step if any
/// intermediate value goes non-finite.
RestorationRun restore(const ImageTensor& y, const NoisePredictor& predictor,
                       const SamplerConfig& config,
                       const std::optional<ImageTensor>& reference = std::nullopt);

struct RestoreInput {
    ImageTensor y;
    std::optional<ImageTensor> reference;
    std::string name;  // used in error reports
};

struct BatchResult {
    std::optional<RestorationRun> run;
    std::string error;  // empty on success
    int diverged_step = -1;
};

/// Restores each input independently with per-input seed config.seed + index.
/// Results are bit-identical for any worker count; failures are collected
/// per input instead of aborting the batch.
std::vector<BatchResult> restore_batch(const std::vector<RestoreInput>& inputs,
                                       const NoisePredictor& predictor,
                                       const SamplerConfig& config, int parallelism);

}  // namespace diffrestore

#endif  // DIFFRESTORE_SAMPLER_HPP
