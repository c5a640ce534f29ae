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

#include "diffrestore/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "diffrestore/errors.hpp"

namespace diffrestore {

namespace {

constexpr int kSsimWindow = 11;
constexpr double kSsimSigma = 1.5;
constexpr double kSsimC1 = 0.01 * 0.01;
constexpr double kSsimC2 = 0.03 * 0.03;
constexpr int kLoeMaxSide = 50;

double to_unit(double v) { return (v + 1.0) * 0.5; }

void require_same_shape(const ImageTensor& a, const ImageTensor& b, const char* metric) {
    if (!a.same_shape(b)) {
        throw DimensionError(std::string(metric) + ": image shapes differ");
    }
}

/// Channel-mean plane in [0,1]; keeps the metric invariant under identical
/// channel permutations of both inputs.
std::vector<double> unit_plane(const ImageTensor& img) {
    const int hw = img.height * img.width;
    std::vector<double> plane(static_cast<size_t>(hw), 0.0);
    for (int c = 0; c < img.channels; ++c) {
        for (int i = 0; i < hw; ++i) {
            plane[static_cast<size_t>(i)] += img.data[static_cast<size_t>(c) * hw + i];
        }
    }
    for (double& v : plane) v = to_unit(v / img.channels);
    return plane;
}

std::vector<double> lightness_map(const ImageTensor& img) {
    const int hw = img.height * img.width;
    std::vector<double> light(static_cast<size_t>(hw), -std::numeric_limits<double>::infinity());
    for (int c = 0; c < img.channels; ++c) {
        for (int i = 0; i < hw; ++i) {
            light[static_cast<size_t>(i)] =
                std::max(light[static_cast<size_t>(i)], img.data[static_cast<size_t>(c) * hw + i]);
        }
    }
    return light;
}

std::vector<double> nearest_downsample(const std::vector<double>& map, int h, int w, int* oh,
                                       int* ow) {
    const int nh = std::min(h, kLoeMaxSide);
    const int nw = std::min(w, kLoeMaxSide);
    *oh = nh;
    *ow = nw;
    std::vector<double> out(static_cast<size_t>(nh) * nw);
    for (int y = 0; y < nh; ++y) {
        const int sy = static_cast<int>((y + 0.5) * h / nh);
        for (int x = 0; x < nw; ++x) {
            const int sx = static_cast<int>((x + 0.5) * w / nw);
            out[static_cast<size_t>(y) * nw + x] = map[static_cast<size_t>(sy) * w + sx];
        }
    }
    return out;
}

}  // namespace

double psnr(const ImageTensor& a, const ImageTensor& b) {
    require_same_shape(a, b, "psnr");
    double acc = 0.0;
    for (size_t i = 0; i < a.data.size(); ++i) {
        const double d = to_unit(a.data[i]) - to_unit(b.data[i]);
        acc += d * d;
    }
    const double m = acc / static_cast<double>(a.data.size());
    if (m == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / m);
}

double ssim(const ImageTensor& a, const ImageTensor& b) {
    require_same_shape(a, b, "ssim");
    if (a.height < kSsimWindow || a.width < kSsimWindow) {
        throw MetricError("ssim: image smaller than the 11x11 window");
    }
    const std::vector<double> pa = unit_plane(a);
    const std::vector<double> pb = unit_plane(b);

    double window[kSsimWindow][kSsimWindow];
    double wsum = 0.0;
    for (int y = 0; y < kSsimWindow; ++y) {
        for (int x = 0; x < kSsimWindow; ++x) {
            const double dy = y - kSsimWindow / 2, dx = x - kSsimWindow / 2;
            window[y][x] = std::exp(-(dy * dy + dx * dx) / (2.0 * kSsimSigma * kSsimSigma));
            wsum += window[y][x];
        }
    }
    for (auto& row : window) {
        for (double& w : row) w /= wsum;
    }

    const int H = a.height, W = a.width;
    double total = 0.0;
    int count = 0;
    for (int y = 0; y + kSsimWindow <= H; ++y) {
        for (int x = 0; x + kSsimWindow <= W; ++x) {
            double mu_a = 0.0, mu_b = 0.0;
            for (int wy = 0; wy < kSsimWindow; ++wy) {
                for (int wx = 0; wx < kSsimWindow; ++wx) {
                    const size_t i = static_cast<size_t>(y + wy) * W + (x + wx);
                    mu_a += window[wy][wx] * pa[i];
                    mu_b += window[wy][wx] * pb[i];
                }
            }
            double va = 0.0, vb = 0.0, cov = 0.0;
            for (int wy = 0; wy < kSsimWindow; ++wy) {
                for (int wx = 0; wx < kSsimWindow; ++wx) {
                    const size_t i = static_cast<size_t>(y + wy) * W + (x + wx);
                    const double da = pa[i] - mu_a;
                    const double db = pb[i] - mu_b;
                    va += window[wy][wx] * da * da;
                    vb += window[wy][wx] * db * db;
                    cov += window[wy][wx] * da * db;
                }
            }
            total += ((2.0 * mu_a * mu_b + kSsimC1) * (2.0 * cov + kSsimC2)) /
                     ((mu_a * mu_a + mu_b * mu_b + kSsimC1) * (va + vb + kSsimC2));
            ++count;
        }
    }
    return total / count;
}

double loe(const ImageTensor& enhanced, const ImageTensor& reference) {
    require_same_shape(enhanced, reference, "loe");
    int h = 0, w = 0;
    const std::vector<double> le =
        nearest_downsample(lightness_map(enhanced), enhanced.height, enhanced.width, &h, &w);
    const std::vector<double> lr =
        nearest_downsample(lightness_map(reference), reference.height, reference.width, &h, &w);
    const size_t n = le.size();
    long long violations = 0;
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) {
            const bool oe = le[i] >= le[j];
            const bool orr = lr[i] >= lr[j];
            if (oe != orr) ++violations;
        }
    }
    return 1000.0 * static_cast<double>(violations) / (static_cast<double>(n) * n);
}

double consistency(const ImageTensor& restored, const ImageTensor& y, const TaskOperator& op) {
    require_same_shape(restored, y, "consistency");
    const ImageTensor re_degraded = degrade(op, restored);
    double acc = 0.0;
    for (size_t i = 0; i < y.data.size(); ++i) {
        const double d = to_unit(re_degraded.data[i]) - to_unit(y.data[i]);
        acc += d * d;
    }
    return 1e4 * acc / static_cast<double>(y.data.size());
}

MetricReport evaluate(const ImageTensor& restored, const ImageTensor& reference,
                      const std::optional<TaskOperator>& op,
                      const std::optional<ImageTensor>& y) {
    MetricReport report;
    report.psnr = psnr(restored, reference);
    report.ssim = ssim(restored, reference);
    report.loe = loe(restored, reference);
    if (op.has_value() && y.has_value()) {
        report.consistency = consistency(restored, *y, *op);
    }
    return report;
}

}  // namespace diffrestore
