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

#ifndef DIFFRESTORE_METRICS_HPP
#define DIFFRESTORE_METRICS_HPP

#include <optional>

#include "diffrestore/synth.hpp"
#include "diffrestore/tensor.hpp"

namespace diffrestore {

/// Per-image quality numbers. psnr is +infinity only for identical images.
struct MetricReport {
    double psnr = 0.0;
    double ssim = 0.0;
    double loe = 0.0;
    std::optional<double> consistency;  // only when the true operator is known
};

/// 10 log10(1 / mse) with pixels mapped to [0,1]; +infinity when a == b.
double psnr(const ImageTensor& a, const ImageTensor& b);

/// Standard SSIM on the channel-mean plane in [0,1] scale: 11x11 Gaussian
/// window (sigma 1.5), C1 = 0.01^2, C2 = 0.03^2, averaged over windows that
/// fit entirely inside the image. Throws MetricError for images smaller than
/// the window.
double ssim(const ImageTensor& a, const ImageTensor& b);

/// Lightness-order error: per-pixel channel max, nearest-neighbor
/// downsampling of both maps to at most 50x50, then the fraction of ordered
/// pixel pairs whose brightness order differs between the two maps, x1000.
double loe(const ImageTensor& enhanced, const ImageTensor& reference);

/// Re-degradation error 1e4 * mse(degrade(op, restored), y) in [0,1] scale.
double consistency(const ImageTensor& restored, const ImageTensor& y, const TaskOperator& op);

MetricReport evaluate(const ImageTensor& restored, const ImageTensor& reference,
                      const std::optional<TaskOperator>& op = std::nullopt,
                      const std::optional<ImageTensor>& y = std::nullopt);

}  // namespace diffrestore

#endif  // DIFFRESTORE_METRICS_HPP
