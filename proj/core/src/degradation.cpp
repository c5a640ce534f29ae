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

#include "diffrestore/degradation.hpp"

#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "diffrestore/errors.hpp"

namespace diffrestore {

ImageTensor apply(const DegradationModel& model, const ImageTensor& x) {
    if (model.mask.channels != model.kernel.out_channels ||
        model.kernel.in_channels != model.kernel.out_channels) {
        throw DimensionError("DegradationModel: kernel/mask channel mismatch");
    }
    ImageTensor out = conv2d(x, model.kernel);
    if (!out.same_shape(model.mask)) {
        throw DimensionError("DegradationModel: mask shape differs from K(x)");
    }
    for (size_t i = 0; i < out.data.size(); ++i) out.data[i] += model.mask.data[i];
    return out;
}

DegradationGrads loss_and_grads(const DegradationModel& model, const ImageTensor& x0_hat,
                                const ImageTensor& y) {
    const ImageTensor dx = apply(model, x0_hat);
    if (!dx.same_shape(y)) {
        throw DimensionError("loss_and_grads: D(x0_hat) and y shapes differ");
    }
    const double n = static_cast<double>(dx.size());
    DegradationGrads out;
    ImageTensor residual = dx;
    double loss = 0.0;
    for (size_t i = 0; i < residual.data.size(); ++i) {
        const double d = residual.data[i] - y.data[i];
        loss += d * d;
        residual.data[i] = 2.0 * d / n;
    }
    out.loss = loss / n;
    out.grad_x = conv2d_adjoint_input(residual, model.kernel);
    out.grad_kernel = conv2d_grad_kernel(x0_hat, residual, model.kernel.out_channels,
                                         model.kernel.in_channels, model.kernel.size);
    out.grad_mask = std::move(residual);
    return out;
}

void project_simplex(KernelBank& kernel) {
    const int k = kernel.size;
    for (int o = 0; o < kernel.out_channels; ++o) {
        double sum = 0.0;
        for (int i = 0; i < kernel.in_channels; ++i) {
            for (int dy = 0; dy < k; ++dy) {
                for (int dx = 0; dx < k; ++dx) {
                    double& w = kernel.at(o, i, dy, dx);
                    if (w < 0.0) w = 0.0;
                    sum += w;
                }
            }
        }
        if (sum <= 0.0) {
            // Everything clipped away: fall back to the identity tap.
            kernel.at(o, o % kernel.in_channels, k / 2, k / 2) = 1.0;
            continue;
        }
        for (int i = 0; i < kernel.in_channels; ++i) {
            for (int dy = 0; dy < k; ++dy) {
                for (int dx = 0; dx < k; ++dx) {
                    kernel.at(o, i, dy, dx) /= sum;
                }
            }
        }
    }
}

DegradationModel update_params(const DegradationModel& model, const KernelBank& grad_kernel,
                               const ImageTensor& grad_mask, double learning_rate) {
    if (!(learning_rate > 0.0)) {
        throw ConfigError("update_params: learning rate must be positive");
    }
    if (grad_kernel.weights.size() != model.kernel.weights.size() ||
        !grad_mask.same_shape(model.mask)) {
        throw DimensionError("update_params: gradient shapes differ from parameters");
    }
    DegradationModel next = model;
    for (size_t i = 0; i < next.kernel.weights.size(); ++i) {
        next.kernel.weights[i] -= learning_rate * grad_kernel.weights[i];
    }
    for (size_t i = 0; i < next.mask.data.size(); ++i) {
        next.mask.data[i] -= learning_rate * grad_mask.data[i];
    }
    if (next.constraint_mode == ConstraintMode::kSimplex) {
        project_simplex(next.kernel);
    }
    return next;
}

DegradationModel init_model(int channels, int height, int width, int kernel_size,
                            KernelInit init, ConstraintMode mode) {
    if (kernel_size % 2 == 0 || kernel_size <= 0) {
        throw ConfigError("init_model: kernel size must be odd and positive");
    }
    DegradationModel model;
    model.kernel = KernelBank(channels, channels, kernel_size, 0.0);
    model.mask = ImageTensor(channels, height, width, 0.0);
    model.constraint_mode = mode;

    const int c = kernel_size / 2;
    if (init == KernelInit::kIdentity) {
        for (int o = 0; o < channels; ++o) model.kernel.at(o, o, c, c) = 1.0;
        return model;
    }

    // Smoothed identity: the center tap spread by a 3x3 box, cropped to the
    // kernel support and renormalized so each output channel sums to 1.
    for (int o = 0; o < channels; ++o) {
        double sum = 0.0;
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                const int ky = c + dy, kx = c + dx;
                if (ky < 0 || ky >= kernel_size || kx < 0 || kx >= kernel_size) continue;
                model.kernel.at(o, o, ky, kx) = 1.0 / 9.0;
                sum += 1.0 / 9.0;
            }
        }
        for (int i = 0; i < channels; ++i) {
            for (int ky = 0; ky < kernel_size; ++ky) {
                for (int kx = 0; kx < kernel_size; ++kx) {
                    model.kernel.at(o, i, ky, kx) /= sum;
                }
            }
        }
    }
    return model;
}

void save_degradation_model(const std::filesystem::path& base, const DegradationModel& model) {
    nlohmann::json header;
    header["kernel"] = {{"out_channels", model.kernel.out_channels},
                        {"in_channels", model.kernel.in_channels},
                        {"size", model.kernel.size}};
    header["mask"] = {{"channels", model.mask.channels},
                      {"height", model.mask.height},
                      {"width", model.mask.width}};
    header["constraint_mode"] =
        model.constraint_mode == ConstraintMode::kSimplex ? "simplex" : "unconstrained";
    header["payload"] = base.filename().string() + ".bin";

    std::ofstream jout(base.string() + ".json");
    if (!jout) throw IoError("cannot write " + base.string() + ".json");
    jout << header.dump(2) << "\n";

    std::ofstream bout(base.string() + ".bin", std::ios::binary);
    if (!bout) throw IoError("cannot write " + base.string() + ".bin");
    bout.write(reinterpret_cast<const char*>(model.kernel.weights.data()),
               static_cast<std::streamsize>(model.kernel.weights.size() * sizeof(double)));
    bout.write(reinterpret_cast<const char*>(model.mask.data.data()),
               static_cast<std::streamsize>(model.mask.data.size() * sizeof(double)));
    if (!bout) throw IoError("write failed: " + base.string() + ".bin");
}

DegradationModel load_degradation_model(const std::filesystem::path& base) {
    std::ifstream jin(base.string() + ".json");
    if (!jin) throw IoError("cannot open " + base.string() + ".json");
    nlohmann::json header;
    jin >> header;

    DegradationModel model;
    model.kernel = KernelBank(header["kernel"]["out_channels"].get<int>(),
                              header["kernel"]["in_channels"].get<int>(),
                              header["kernel"]["size"].get<int>());
    model.mask = ImageTensor(header["mask"]["channels"].get<int>(),
                             header["mask"]["height"].get<int>(),
                             header["mask"]["width"].get<int>());
    model.constraint_mode = header["constraint_mode"].get<std::string>() == "simplex"
                                ? ConstraintMode::kSimplex
                                : ConstraintMode::kUnconstrained;

    std::ifstream bin(base.string() + ".bin", std::ios::binary);
    if (!bin) throw IoError("cannot open " + base.string() + ".bin");
    bin.read(reinterpret_cast<char*>(model.kernel.weights.data()),
             static_cast<std::streamsize>(model.kernel.weights.size() * sizeof(double)));
    bin.read(reinterpret_cast<char*>(model.mask.data.data()),
             static_cast<std::streamsize>(model.mask.data.size() * sizeof(double)));
    if (!bin) throw IoError(base.string() + ".bin: truncated payload");
    return model;
}

}  // namespace diffrestore
