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

#ifndef DIFFRESTORE_DEGRADATION_HPP
#define DIFFRESTORE_DEGRADATION_HPP

#include <filesystem>

#include "diffrestore/tensor.hpp"

namespace diffrestore {

enum class ConstraintMode {
    kUnconstrained,  // default: gain kernels with weight-sum < 1 stay representable
    kSimplex,        // nonnegative weights summing to 1 per output channel
};

/// Learnable degradation D(x) = K(x) + M: a channel-mixing convolution bank
/// plus an additive mask with the image's shape.
struct DegradationModel {
    KernelBank kernel;
    ImageTensor mask;
    ConstraintMode constraint_mode = ConstraintMode::kUnconstrained;
};

/// Gradients of mse(D(x0_hat), y) with respect to everything learnable and
/// to the image estimate itself.
struct DegradationGrads {
    double loss = 0.0;
    ImageTensor grad_x;
    KernelBank grad_kernel;
    ImageTensor grad_mask;
};

enum class KernelInit {
    kIdentity,          // center tap 1 on the channel diagonal
    kSmoothedIdentity,  // identity convolved with a 3x3 box, renormalized
};

/// conv2d(x, kernel) + mask.
ImageTensor apply(const DegradationModel& model, const ImageTensor& x);

/// loss = mse(apply(model, x0_hat), y) and its gradients. With
/// r = (2/n)(D(x0_hat) - y): grad_x = K^T r, grad_kernel = d<Kx, r>/dK,
/// grad_mask = r.
DegradationGrads loss_and_grads(const DegradationModel& model, const ImageTensor& x0_hat,
                                const ImageTensor& y);

/// One plain gradient-descent step on kernel and mask; in simplex mode the
/// kernel is then projected (negatives clipped, each output-channel slice
/// renormalized to sum 1, identity fallback if a slice clips to all zeros).
DegradationModel update_params(const DegradationModel& model, const KernelBank& grad_kernel,
                               const ImageTensor& grad_mask, double learning_rate);

/// Fresh model with zero mask and an identity-like kernel.
DegradationModel init_model(int channels, int height, int width, int kernel_size,
                            KernelInit init,
                            ConstraintMode mode = ConstraintMode::kUnconstrained);

/// Projects kernel weights onto the per-output-channel simplex.
void project_simplex(KernelBank& kernel);

/// Serializes kernel+mask as a JSON header (shapes, mode) next to a flat
/// binary payload of row-major 64-bit floats. `base` gets the extensions
/// .json and .bin.
void save_degradation_model(const std::filesystem::path& base, const DegradationModel& model);
DegradationModel load_degradation_model(const std::filesystem::path& base);

}  // namespace diffrestore

#endif  // DIFFRESTORE_DEGRADATION_HPP
