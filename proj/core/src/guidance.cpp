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

#include "diffrestore/guidance.hpp"

#include <algorithm>
#include <cmath>

#include "diffrestore/errors.hpp"

namespace diffrestore {

double adaptive_scale(const GuidanceState& state, const ImageTensor& x_t,
                      const ImageTensor& grad_L_xt, double loss) {
    if (!state.prev_mean.has_value()) {
        return std::clamp(state.s_init, state.s_min, state.s_max);
    }
    if (!(loss > 0.0)) {
        throw GuidanceError("adaptive_scale: loss must be positive");
    }
    const ImageTensor delta = sub(x_t, *state.prev_mean);
    const double correction = dot(delta, grad_L_xt) / loss;
    const double s = state.prev_scale * (1.0 + correction);
    return std::clamp(s, state.s_min, state.s_max);
}

ImageTensor guidance_shift(const ImageTensor& x0_hat, const ImageTensor& grad_x0, double s,
                           const DiffusionSchedule& sched, int t) {
    if (!x0_hat.same_shape(grad_x0)) {
        throw DimensionError("guidance_shift: x0_hat and grad_x0 shapes differ");
    }
    const double ab_t = sched.alpha_bar(t);
    const double ab_prev = sched.alpha_bar(t - 1);
    const double coef = s * (1.0 - ab_t) / (std::sqrt(ab_prev) * sched.beta(t));
    ImageTensor out = x0_hat;
    for (size_t i = 0; i < out.data.size(); ++i) {
        out.data[i] -= coef * grad_x0.data[i];
    }
    return out;
}

ImageTensor g_term(double s, const ImageTensor& grad_L_xt) {
    return scale(grad_L_xt, -s);
}

ImageTensor grad_wrt_xt(const ImageTensor& grad_x0, const DiffusionSchedule& sched, int t) {
    return scale(grad_x0, 1.0 / std::sqrt(sched.alpha_bar(t)));
}

}  // namespace diffrestore
