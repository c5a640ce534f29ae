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

#ifndef DIFFRESTORE_GUIDANCE_HPP
#define DIFFRESTORE_GUIDANCE_HPP

#include <optional>

#include "diffrestore/schedule.hpp"
#include "diffrestore/tensor.hpp"

namespace diffrestore {

/// State carried across reverse steps by the adaptive guidance scale.
///
/// prev_mean is the mean of the Gaussian x_t was actually sampled from (the
/// natural expansion point for the scale update); it is absent at t = T
/// where x_T comes from pure noise, in which case the scale is the clamped
/// initial value.
struct GuidanceState {
    double prev_scale = 0.0;
    std::optional<ImageTensor> prev_mean;
    double s_init = 2000.0;
    double s_min = 1.0;
    double s_max = 1e6;
};

/// Next guidance scale.
///
/// The likelihood-scale identity evaluated with the previous step's
/// calibration closes to the recursion
///   s = s_prev * (1 + <x_t - prev_mean, grad_L_xt> / loss),
/// clamped to [s_min, s_max]. grad_L_xt must be the loss gradient with
/// respect to x_t (the x0-estimate gradient times 1/sqrt(alpha_bar_t)).
/// Callers must skip guidance instead of calling this when loss underflows
/// to zero.
double adaptive_scale(const GuidanceState& state, const ImageTensor& x_t,
                      const ImageTensor& grad_L_xt, double loss);

/// Moves the x0 estimate against the loss gradient with the step weight that
/// makes the posterior mean shift by exactly -s * grad_x0:
///   x0_hat - s (1 - ab_t) / (sqrt(ab_{t-1}) beta_t) * grad_x0.
ImageTensor guidance_shift(const ImageTensor& x0_hat, const ImageTensor& grad_x0, double s,
                           const DiffusionSchedule& sched, int t);

/// Likelihood-score stand-in g = -s * grad_L_xt.
ImageTensor g_term(double s, const ImageTensor& grad_L_xt);

/// Chain rule from the x0-estimate gradient to the x_t gradient: the noise
/// prediction is treated as locally constant, leaving the 1/sqrt(ab_t)
/// factor of the x0 reconstruction.
ImageTensor grad_wrt_xt(const ImageTensor& grad_x0, const DiffusionSchedule& sched, int t);

}  // namespace diffrestore

#endif  // DIFFRESTORE_GUIDANCE_HPP
