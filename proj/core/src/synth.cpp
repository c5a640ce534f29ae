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

#include "diffrestore/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "diffrestore/errors.hpp"
#include "diffrestore/rng.hpp"

namespace diffrestore {

namespace {

constexpr double kRec601R = 0.299;
constexpr double kRec601G = 0.587;
constexpr double kRec601B = 0.114;

void validate(const TaskOperator& op) {
    switch (op.kind) {
        case TaskKind::kGaussianBlur:
            if (!(op.sigma > 0.0)) throw ConfigError("gaussian_blur: sigma must be > 0");
            if (op.kernel_size <= 0 || op.kernel_size % 2 == 0) {
                throw ConfigError("gaussian_blur: kernel size must be odd and positive");
            }
            break;
        case TaskKind::kMotionBlur:
            if (!(op.length >= 1.0)) throw ConfigError("motion_blur: length must be >= 1");
            break;
        case TaskKind::kInpaint:
            if (!op.mask_bitmap.has_value() && !(op.ratio > 0.0 && op.ratio < 1.0)) {
                throw ConfigError("inpaint: ratio must lie in (0,1)");
            }
            break;
        case TaskKind::kLowLight:
            if (!(op.gain > 0.0 && op.gain < 1.0)) {
                throw ConfigError("low_light: gain must lie in (0,1)");
            }
            if (op.bias < op.gain - 1.0 - 1e-12 || op.bias > 1.0 - op.gain + 1e-12) {
                throw ConfigError("low_light: bias must lie in [gain-1, 1-gain]");
            }
            break;
        case TaskKind::kHdrClip:
            if (!(op.threshold >= -1.0 && op.threshold <= 1.0)) {
                throw ConfigError("hdr_clip: threshold must lie in [-1,1]");
            }
            break;
        case TaskKind::kCompose:
            if (op.parts.empty()) throw ConfigError("compose: needs at least one operator");
            break;
        default:
            break;
    }
}

KernelBank diagonal_bank(const std::vector<double>& taps, int k, int channels) {
    KernelBank bank(channels, channels, k, 0.0);
    for (int c = 0; c < channels; ++c) {
        for (int dy = 0; dy < k; ++dy) {
            for (int dx = 0; dx < k; ++dx) {
                bank.at(c, c, dy, dx) = taps[static_cast<size_t>(dy) * k + dx];
            }
        }
    }
    return bank;
}

std::vector<double> motion_kernel_weights(double length, double angle_deg, int* k_out) {
    const int k = static_cast<int>(std::ceil(length)) | 1;  // next odd >= length
    *k_out = k;
    std::vector<double> taps(static_cast<size_t>(k) * k, 0.0);
    const double theta = angle_deg * std::numbers::pi / 180.0;
    const double cx = k / 2, cy = k / 2;
    const double half = (length - 1.0) / 2.0;
    const int samples = std::max(2, 8 * k);
    // Bilinear splat along the segment; deterministic in (length, angle).
    for (int i = 0; i < samples; ++i) {
        const double u = static_cast<double>(i) / (samples - 1) * 2.0 - 1.0;  // [-1, 1]
        const double px = cx + u * half * std::cos(theta);
        const double py = cy + u * half * std::sin(theta);
        const int x0 = static_cast<int>(std::floor(px));
        const int y0 = static_cast<int>(std::floor(py));
        const double fx = px - x0, fy = py - y0;
        struct Splat { int x, y; double w; } splats[4] = {
            {x0, y0, (1 - fx) * (1 - fy)},
            {x0 + 1, y0, fx * (1 - fy)},
            {x0, y0 + 1, (1 - fx) * fy},
            {x0 + 1, y0 + 1, fx * fy},
        };
        for (const auto& s : splats) {
            if (s.x >= 0 && s.x < k && s.y >= 0 && s.y < k && s.w > 0.0) {
                taps[static_cast<size_t>(s.y) * k + s.x] += s.w;
            }
        }
    }
    double sum = 0.0;
    for (double w : taps) sum += w;
    for (double& w : taps) w /= sum;
    return taps;
}

ImageTensor apply_inpaint(const TaskOperator& op, const ImageTensor& x) {
    ImageTensor out = x;
    const int hw = x.height * x.width;
    if (op.mask_bitmap.has_value()) {
        const ImageTensor& m = *op.mask_bitmap;
        if (m.height != x.height || m.width != x.width) {
            throw DimensionError("inpaint: mask bitmap shape differs from image");
        }
        for (int c = 0; c < x.channels; ++c) {
            for (int i = 0; i < hw; ++i) {
                if (m.data[static_cast<size_t>(i)] > 0.0) {
                    out.data[static_cast<size_t>(c) * hw + i] = -1.0;
                }
            }
        }
        return out;
    }
    // Keyed selection: the masked set is the ratio*H*W pixels with the
    // smallest per-pixel hash, so the mask is exact-count and reproducible.
    const int count = static_cast<int>(std::floor(op.ratio * hw));
    std::vector<std::pair<uint64_t, int>> keyed(static_cast<size_t>(hw));
    const NoiseStream stream(op.seed);
    for (int i = 0; i < hw; ++i) {
        keyed[static_cast<size_t>(i)] = {stream.bits(0, static_cast<uint64_t>(i)), i};
    }
    std::nth_element(keyed.begin(), keyed.begin() + count, keyed.end());
    for (int j = 0; j < count; ++j) {
        const int i = keyed[static_cast<size_t>(j)].second;
        for (int c = 0; c < x.channels; ++c) {
            out.data[static_cast<size_t>(c) * hw + i] = -1.0;
        }
    }
    return out;
}

ImageTensor apply_downsample4x(const ImageTensor& x) {
    ImageTensor out = x;
    for (int c = 0; c < x.channels; ++c) {
        for (int by = 0; by < x.height; by += 4) {
            const int bh = std::min(4, x.height - by);
            for (int bx = 0; bx < x.width; bx += 4) {
                const int bw = std::min(4, x.width - bx);
                double acc = 0.0;
                for (int y = 0; y < bh; ++y) {
                    for (int xx = 0; xx < bw; ++xx) acc += x.at(c, by + y, bx + xx);
                }
                const double mean = acc / (bh * bw);
                for (int y = 0; y < bh; ++y) {
                    for (int xx = 0; xx < bw; ++xx) out.at(c, by + y, bx + xx) = mean;
                }
            }
        }
    }
    return out;
}

ImageTensor apply_grayscale(const ImageTensor& x) {
    if (x.channels == 1) return x;
    if (x.channels != 3) {
        throw DimensionError("grayscale: expects 1 or 3 channels");
    }
    ImageTensor out = x;
    for (int y = 0; y < x.height; ++y) {
        for (int xx = 0; xx < x.width; ++xx) {
            const double lum =
                kRec601R * x.at(0, y, xx) + kRec601G * x.at(1, y, xx) + kRec601B * x.at(2, y, xx);
            out.at(0, y, xx) = lum;
            out.at(1, y, xx) = lum;
            out.at(2, y, xx) = lum;
        }
    }
    return out;
}

}  // namespace

std::vector<double> gaussian_kernel_weights(double sigma, int kernel_size) {
    if (!(sigma > 0.0) || kernel_size <= 0 || kernel_size % 2 == 0) {
        throw ConfigError("gaussian_kernel_weights: bad sigma or size");
    }
    std::vector<double> taps(static_cast<size_t>(kernel_size) * kernel_size);
    const int half = kernel_size / 2;
    double sum = 0.0;
    for (int dy = -half; dy <= half; ++dy) {
        for (int dx = -half; dx <= half; ++dx) {
            const double w = std::exp(-(dy * dy + dx * dx) / (2.0 * sigma * sigma));
            taps[static_cast<size_t>(dy + half) * kernel_size + (dx + half)] = w;
            sum += w;
        }
    }
    for (double& w : taps) w /= sum;
    return taps;
}

TaskOperator make_gaussian_blur(double sigma, int kernel_size) {
    TaskOperator op;
    op.kind = TaskKind::kGaussianBlur;
    op.sigma = sigma;
    op.kernel_size = kernel_size;
    validate(op);
    return op;
}

TaskOperator make_motion_blur(double length, double angle_deg) {
    TaskOperator op;
    op.kind = TaskKind::kMotionBlur;
    op.length = length;
    op.angle_deg = angle_deg;
    validate(op);
    return op;
}

TaskOperator make_downsample4x() {
    TaskOperator op;
    op.kind = TaskKind::kDownsample4x;
    return op;
}

TaskOperator make_grayscale() {
    TaskOperator op;
    op.kind = TaskKind::kGrayscale;
    return op;
}

TaskOperator make_inpaint(double ratio, uint64_t seed) {
    TaskOperator op;
    op.kind = TaskKind::kInpaint;
    op.ratio = ratio;
    op.seed = seed;
    validate(op);
    return op;
}

TaskOperator make_inpaint(ImageTensor mask_bitmap) {
    TaskOperator op;
    op.kind = TaskKind::kInpaint;
    op.mask_bitmap = std::move(mask_bitmap);
    return op;
}

TaskOperator make_low_light(double gain, std::optional<double> bias) {
    TaskOperator op;
    op.kind = TaskKind::kLowLight;
    op.gain = gain;
    op.bias = bias.value_or(gain - 1.0);
    validate(op);
    return op;
}

TaskOperator make_hdr_clip(double threshold) {
    TaskOperator op;
    op.kind = TaskKind::kHdrClip;
    op.threshold = threshold;
    validate(op);
    return op;
}

TaskOperator make_compose(std::vector<TaskOperator> parts) {
    TaskOperator op;
    op.kind = TaskKind::kCompose;
    op.parts = std::move(parts);
    validate(op);
    return op;
}

ImageTensor degrade(const TaskOperator& op, const ImageTensor& x) {
    validate(op);
    switch (op.kind) {
        case TaskKind::kGaussianBlur: {
            const auto taps = gaussian_kernel_weights(op.sigma, op.kernel_size);
            return conv2d(x, diagonal_bank(taps, op.kernel_size, x.channels));
        }
        case TaskKind::kMotionBlur: {
            int k = 0;
            const auto taps = motion_kernel_weights(op.length, op.angle_deg, &k);
            return conv2d(x, diagonal_bank(taps, k, x.channels));
        }
        case TaskKind::kDownsample4x:
            return apply_downsample4x(x);
        case TaskKind::kGrayscale:
            return apply_grayscale(x);
        case TaskKind::kInpaint:
            return apply_inpaint(op, x);
        case TaskKind::kLowLight: {
            ImageTensor out = x;
            for (double& v : out.data) v = op.gain * v + op.bias;
            return out;
        }
        case TaskKind::kHdrClip: {
            ImageTensor out = x;
            for (double& v : out.data) v = std::min(v, op.threshold);
            return out;
        }
        case TaskKind::kCompose: {
            ImageTensor out = x;
            for (const auto& part : op.parts) out = degrade(part, out);
            return out;
        }
    }
    throw ConfigError("degrade: unknown operator kind");
}

std::optional<DegradationModel> representable_as_degradation_model(const TaskOperator& op,
                                                                   int channels, int height,
                                                                   int width) {
    validate(op);
    DegradationModel model;
    model.mask = ImageTensor(channels, height, width, 0.0);
    switch (op.kind) {
        case TaskKind::kGaussianBlur:
            model.kernel = diagonal_bank(gaussian_kernel_weights(op.sigma, op.kernel_size),
                                         op.kernel_size, channels);
            return model;
        case TaskKind::kMotionBlur: {
            int k = 0;
            const auto taps = motion_kernel_weights(op.length, op.angle_deg, &k);
            model.kernel = diagonal_bank(taps, k, channels);
            return model;
        }
        case TaskKind::kGrayscale: {
            if (channels != 3) return std::nullopt;
            model.kernel = KernelBank(3, 3, 1, 0.0);
            const double w[3] = {kRec601R, kRec601G, kRec601B};
            for (int o = 0; o < 3; ++o) {
                for (int i = 0; i < 3; ++i) model.kernel.at(o, i, 0, 0) = w[i];
            }
            return model;
        }
        case TaskKind::kLowLight: {
            model.kernel = KernelBank(channels, channels, 1, 0.0);
            for (int c = 0; c < channels; ++c) model.kernel.at(c, c, 0, 0) = op.gain;
            for (double& v : model.mask.data) v = op.bias;
            return model;
        }
        default:
            return std::nullopt;
    }
}

}  // namespace diffrestore
