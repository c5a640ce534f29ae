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

#include "diffrestore/schedule.hpp"

#include <cmath>
#include <string>

#include "diffrestore/errors.hpp"

namespace diffrestore {

DiffusionSchedule::DiffusionSchedule(std::vector<double> betas) : beta_(std::move(betas)) {
    if (beta_.size() < 2) {
        throw ConfigError("DiffusionSchedule: need at least 2 steps");
    }
    const int T = static_cast<int>(beta_.size());
    alpha_.resize(T);
    alpha_bar_.resize(T);
    beta_tilde_.resize(T);
    double prod = 1.0;
    for (int i = 0; i < T; ++i) {
        const double b = beta_[i];
        if (!(b > 0.0 && b < 1.0)) {
            throw ConfigError("DiffusionSchedule: beta[" + std::to_string(i + 1) +
                              "] = " + std::to_string(b) + " outside (0,1)");
        }
        alpha_[i] = 1.0 - b;
        const double prev_bar = prod;
        prod *= alpha_[i];
        alpha_bar_[i] = prod;
        beta_tilde_[i] = (1.0 - prev_bar) / (1.0 - prod) * b;
    }
}

void DiffusionSchedule::check_step(int t) const {
    if (t < 1 || t > steps()) {
        throw StepError("step " + std::to_string(t) + " outside [1, " +
                        std::to_string(steps()) + "]");
    }
}

DiffusionSchedule make_linear_schedule(int steps, double beta_start, double beta_end) {
    if (steps < 2) {
        throw ConfigError("make_linear_schedule: steps must be >= 2");
    }
    if (!(beta_start > 0.0 && beta_start <= beta_end && beta_end < 1.0)) {
        throw ConfigError("make_linear_schedule: need 0 < beta_start <= beta_end < 1");
    }
    std::vector<double> betas(steps);
    for (int i = 0; i < steps; ++i) {
        betas[i] = beta_start + (beta_end - beta_start) * static_cast<double>(i) /
                                    static_cast<double>(steps - 1);
    }
    return DiffusionSchedule(std::move(betas));
}

ImageTensor forward_sample(const DiffusionSchedule& sched, const ImageTensor& x0,
                           int t, const ImageTensor& eps) {
    if (!x0.same_shape(eps)) {
        throw DimensionError("forward_sample: x0 and eps shapes differ");
    }
    const double ab = sched.alpha_bar(t);
    const double c0 = std::sqrt(ab);
    const double ce = std::sqrt(1.0 - ab);
    ImageTensor out = x0;
    for (size_t i = 0; i < out.data.size(); ++i) {
        out.data[i] = c0 * x0.data[i] + ce * eps.data[i];
    }
    return out;
}

std::pair<ImageTensor, double> posterior_params(const DiffusionSchedule& sched,
                                                const ImageTensor& x0_hat,
                                                const ImageTensor& x_t, int t) {
    if (!x0_hat.same_shape(x_t)) {
        throw DimensionError("posterior_params: x0_hat and x_t shapes differ");
    }
    if (t == 1) {
        return {x0_hat, 0.0};
    }
    const double ab_t = sched.alpha_bar(t);
    const double ab_prev = sched.alpha_bar(t - 1);
    const double beta_t = sched.beta(t);
    const double c0 = std::sqrt(ab_prev) * beta_t / (1.0 - ab_t);
    const double ct = std::sqrt(sched.alpha(t)) * (1.0 - ab_prev) / (1.0 - ab_t);
    ImageTensor mean = x0_hat;
    for (size_t i = 0; i < mean.data.size(); ++i) {
        mean.data[i] = c0 * x0_hat.data[i] + ct * x_t.data[i];
    }
    return {std::move(mean), sched.beta_tilde(t)};
}

}  // namespace diffrestore
