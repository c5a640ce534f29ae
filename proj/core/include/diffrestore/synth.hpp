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

#ifndef DIFFRESTORE_SYNTH_HPP
#define DIFFRESTORE_SYNTH_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "diffrestore/degradation.hpp"
#include "diffrestore/tensor.hpp"

namespace diffrestore {

enum class TaskKind {
    kGaussianBlur,
    kMotionBlur,
    kDownsample4x,
    kGrayscale,
    kInpaint,
    kLowLight,
    kHdrClip,
    kCompose,
};

/// Ground-truth degradation operator used to fabricate test pairs. Every
/// operator is a pure function of (x, seed) and maps [-1,1] into [-1,1].
struct TaskOperator {
    TaskKind kind = TaskKind::kGaussianBlur;

    double sigma = 1.0;      // gaussian_blur
    int kernel_size = 5;     // gaussian_blur

    double length = 5.0;     // motion_blur, in pixels
    double angle_deg = 0.0;  // motion_blur

    double ratio = 0.25;                      // inpaint: fraction of pixels
    uint64_t seed = 0;                        // inpaint: mask stream
    std::optional<ImageTensor> mask_bitmap;   // inpaint: 1 = masked, overrides ratio
    std::string mask_file;                    // inpaint: provenance of mask_bitmap

    double gain = 0.3;  // low_light: y = gain * x + bias
    double bias = 0.0;  // low_light

    double threshold = 0.5;  // hdr_clip: y = min(x, threshold)

    std::vector<TaskOperator> parts;  // compose, applied left to right
};

TaskOperator make_gaussian_blur(double sigma, int kernel_size);
TaskOperator make_motion_blur(double length, double angle_deg);
TaskOperator make_downsample4x();
TaskOperator make_grayscale();
TaskOperator make_inpaint(double ratio, uint64_t seed);
TaskOperator make_inpaint(ImageTensor mask_bitmap);
/// Low-light analog: gain in (0,1) with bias defaulting to gain - 1, which
/// is a pure multiplicative dim in [0,1] luminance terms.
TaskOperator make_low_light(double gain, std::optional<double> bias = std::nullopt);
TaskOperator make_hdr_clip(double threshold);
TaskOperator make_compose(std::vector<TaskOperator> parts);

/// Applies the operator. Throws ConfigError for invalid parameters.
ImageTensor degrade(const TaskOperator& op, const ImageTensor& x);

/// Normalized Gaussian tap matrix used by gaussian_blur (exposed so tests
/// and the kernel-recovery harness can reference the true kernel).
std::vector<double> gaussian_kernel_weights(double sigma, int kernel_size);

/// The exact (K, M) equivalent when the operator is an affine map realized
/// by a convolution plus constant: gaussian_blur, motion_blur, grayscale,
/// low_light. Others return nullopt.
std::optional<DegradationModel> representable_as_degradation_model(const TaskOperator& op,
                                                                   int channels, int height,
                                                                   int width);

}  // namespace diffrestore

#endif  // DIFFRESTORE_SYNTH_HPP
