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

#include "diffrestore/tensor.hpp"

#include <cmath>
#include <string>

#include "diffrestore/errors.hpp"

namespace diffrestore {

namespace {

int clamp_index(int v, int hi) {
    if (v < 0) return 0;
    if (v > hi) return hi;
    return v;
}

void require_same_shape(const ImageTensor& a, const ImageTensor& b, const char* op) {
    if (!a.same_shape(b)) {
        throw DimensionError(std::string(op) + ": shape mismatch (" +
                             std::to_string(a.channels) + "x" + std::to_string(a.height) + "x" +
                             std::to_string(a.width) + " vs " + std::to_string(b.channels) + "x" +
                             std::to_string(b.height) + "x" + std::to_string(b.width) + ")");
    }
}

}  // namespace

ImageTensor::ImageTensor(int c, int h, int w, double fill)
    : channels(c), height(h), width(w),
      data(static_cast<size_t>(c) * h * w, fill) {
    if (c <= 0 || h <= 0 || w <= 0) {
        throw DimensionError("ImageTensor: dimensions must be positive");
    }
}

KernelBank::KernelBank(int out_c, int in_c, int k, double fill)
    : out_channels(out_c), in_channels(in_c), size(k),
      weights(static_cast<size_t>(out_c) * in_c * k * k, fill) {
    if (out_c <= 0 || in_c <= 0 || k <= 0) {
        throw DimensionError("KernelBank: dimensions must be positive");
    }
    if (k % 2 == 0) {
        throw DimensionError("KernelBank: kernel size must be odd");
    }
}

ImageTensor conv2d(const ImageTensor& x, const KernelBank& k) {
    if (x.channels != k.in_channels) {
        throw DimensionError("conv2d: input has " + std::to_string(x.channels) +
                             " channels, kernel expects " + std::to_string(k.in_channels));
    }
    const int H = x.height, W = x.width, half = k.size / 2;
    ImageTensor out(k.out_channels, H, W, 0.0);
    for (int o = 0; o < k.out_channels; ++o) {
        for (int i = 0; i < k.in_channels; ++i) {
            for (int y = 0; y < H; ++y) {
                for (int xx = 0; xx < W; ++xx) {
                    double acc = 0.0;
                    for (int dy = -half; dy <= half; ++dy) {
                        const int sy = clamp_index(y + dy, H - 1);
                        for (int dx = -half; dx <= half; ++dx) {
                            const int sx = clamp_index(xx + dx, W - 1);
                            acc += k.at(o, i, dy + half, dx + half) * x.at(i, sy, sx);
                        }
                    }
                    out.at(o, y, xx) += acc;
                }
            }
        }
    }
    return out;
}

ImageTensor conv2d_adjoint_input(const ImageTensor& g, const KernelBank& k) {
    if (g.channels != k.out_channels) {
        throw DimensionError("conv2d_adjoint_input: gradient has " + std::to_string(g.channels) +
                             " channels, kernel produces " + std::to_string(k.out_channels));
    }
    const int H = g.height, W = g.width, half = k.size / 2;
    ImageTensor out(k.in_channels, H, W, 0.0);
    // Scatter each output tap back onto the clamped source pixel; the clamp
    // is what carries the replicate-padding boundary terms into the adjoint.
    for (int o = 0; o < k.out_channels; ++o) {
        for (int i = 0; i < k.in_channels; ++i) {
            for (int y = 0; y < H; ++y) {
                for (int xx = 0; xx < W; ++xx) {
                    const double gv = g.at(o, y, xx);
                    for (int dy = -half; dy <= half; ++dy) {
                        const int sy = clamp_index(y + dy, H - 1);
                        for (int dx = -half; dx <= half; ++dx) {
                            const int sx = clamp_index(xx + dx, W - 1);
                            out.at(i, sy, sx) += k.at(o, i, dy + half, dx + half) * gv;
                        }
                    }
                }
            }
        }
    }
    return out;
}

KernelBank conv2d_grad_kernel(const ImageTensor& x, const ImageTensor& g,
                              int out_channels, int in_channels, int kernel_size) {
    if (x.channels != in_channels || g.channels != out_channels || !(x.height == g.height && x.width == g.width)) {
        throw DimensionError("conv2d_grad_kernel: shapes inconsistent with conv2d(x, k) = g");
    }
    if (kernel_size % 2 == 0) {
        throw DimensionError("conv2d_grad_kernel: kernel size must be odd");
    }
    const int H = x.height, W = x.width, half = kernel_size / 2;
    KernelBank grad(out_channels, in_channels, kernel_size, 0.0);
    for (int o = 0; o < out_channels; ++o) {
        for (int i = 0; i < in_channels; ++i) {
            for (int dy = -half; dy <= half; ++dy) {
                for (int dx = -half; dx <= half; ++dx) {
                    double acc = 0.0;
                    for (int y = 0; y < H; ++y) {
                        const int sy = clamp_index(y + dy, H - 1);
                        for (int xx = 0; xx < W; ++xx) {
                            const int sx = clamp_index(xx + dx, W - 1);
                            acc += g.at(o, y, xx) * x.at(i, sy, sx);
                        }
                    }
                    grad.at(o, i, dy + half, dx + half) = acc;
                }
            }
        }
    }
    return grad;
}

ImageTensor add(const ImageTensor& a, const ImageTensor& b) {
    require_same_shape(a, b, "add");
    ImageTensor out = a;
    for (size_t i = 0; i < out.data.size(); ++i) out.data[i] += b.data[i];
    return out;
}

ImageTensor sub(const ImageTensor& a, const ImageTensor& b) {
    require_same_shape(a, b, "sub");
    ImageTensor out = a;
    for (size_t i = 0; i < out.data.size(); ++i) out.data[i] -= b.data[i];
    return out;
}

ImageTensor scale(const ImageTensor& a, double factor) {
    ImageTensor out = a;
    for (double& v : out.data) v *= factor;
    return out;
}

double mse(const ImageTensor& a, const ImageTensor& b) {
    require_same_shape(a, b, "mse");
    double acc = 0.0;
    for (size_t i = 0; i < a.data.size(); ++i) {
        const double d = a.data[i] - b.data[i];
        acc += d * d;
    }
    return acc / static_cast<double>(a.data.size());
}

double dot(const ImageTensor& a, const ImageTensor& b) {
    require_same_shape(a, b, "dot");
    double acc = 0.0;
    for (size_t i = 0; i < a.data.size(); ++i) acc += a.data[i] * b.data[i];
    return acc;
}

bool all_finite(const ImageTensor& a) {
    for (double v : a.data) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

bool all_finite(const KernelBank& k) {
    for (double v : k.weights) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

}  // namespace diffrestore
