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

#ifndef DIFFRESTORE_TENSOR_HPP
#define DIFFRESTORE_TENSOR_HPP

#include <cstddef>
#include <vector>

namespace diffrestore {

/// Dense C x H x W image tensor, row-major per channel, 64-bit floats.
///
/// Carries images in the nominal range [-1, 1] as well as unbounded
/// gradients. All arithmetic on it is double precision and accumulates in a
/// fixed row-major, channel-outer order, so identical inputs always produce
/// bit-identical outputs.
struct ImageTensor {
    int channels = 0;
    int height = 0;
    int width = 0;
    std::vector<double> data;

    ImageTensor() = default;
    ImageTensor(int c, int h, int w, double fill = 0.0);

    double& at(int c, int y, int x) { return data[(static_cast<size_t>(c) * height + y) * width + x]; }
    double at(int c, int y, int x) const { return data[(static_cast<size_t>(c) * height + y) * width + x]; }

    size_t size() const { return data.size(); }
    bool same_shape(const ImageTensor& other) const {
        return channels == other.channels && height == other.height && width == other.width;
    }
};

/// Bank of convolution weights, shape out x in x k x k with odd k.
struct KernelBank {
    int out_channels = 0;
    int in_channels = 0;
    int size = 0;  // odd
    std::vector<double> weights;

    KernelBank() = default;
    KernelBank(int out_c, int in_c, int k, double fill = 0.0);

    double& at(int o, int i, int dy, int dx) {
        return weights[((static_cast<size_t>(o) * in_channels + i) * size + dy) * size + dx];
    }
    double at(int o, int i, int dy, int dx) const {
        return weights[((static_cast<size_t>(o) * in_channels + i) * size + dy) * size + dx];
    }
};

/// 2-D correlation (no kernel flip) with replicate boundary padding.
/// output[o] = sum_i correlate(x[i], k[o][i]); output keeps x's H x W.
ImageTensor conv2d(const ImageTensor& x, const KernelBank& k);

/// Exact adjoint of conv2d with respect to the standard inner product,
/// including the replicate-padding boundary contribution:
/// <conv2d(x,k), g> == <x, conv2d_adjoint_input(g,k)> for all x, g.
ImageTensor conv2d_adjoint_input(const ImageTensor& g, const KernelBank& k);

/// Gradient of <conv2d(x,k), g> with respect to the kernel weights.
KernelBank conv2d_grad_kernel(const ImageTensor& x, const ImageTensor& g,
                              int out_channels, int in_channels, int kernel_size);

ImageTensor add(const ImageTensor& a, const ImageTensor& b);
ImageTensor sub(const ImageTensor& a, const ImageTensor& b);
ImageTensor scale(const ImageTensor& a, double factor);

/// Mean of squared differences over all elements.
double mse(const ImageTensor& a, const ImageTensor& b);

/// Standard inner product over all elements.
double dot(const ImageTensor& a, const ImageTensor& b);

/// True when every element is finite (no NaN/Inf).
bool all_finite(const ImageTensor& a);
bool all_finite(const KernelBank& k);

}  // namespace diffrestore

#endif  // DIFFRESTORE_TENSOR_HPP
