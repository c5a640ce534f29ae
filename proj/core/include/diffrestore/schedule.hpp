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

#ifndef DIFFRESTORE_SCHEDULE_HPP
#define DIFFRESTORE_SCHEDULE_HPP

#include <utility>
#include <vector>

#include "diffrestore/tensor.hpp"

namespace diffrestore {

/// Noise schedule and the coefficient tables derived from it.
///
/// Tables are 1-indexed by diffusion step t in [1, T]; alpha_bar(0) == 1 by
/// convention so beta_tilde(1) == 0 and the final reverse step is
/// deterministic.
class DiffusionSchedule {
public:
    DiffusionSchedule(std::vector<double> betas);

    int steps() const { return static_cast<int>(beta_.size()); }
    double beta(int t) const { check_step(t); return beta_[t - 1]; }
    double alpha(int t) const { check_step(t); return alpha_[t - 1]; }
    double alpha_bar(int t) const {  // defined for t in [0, T]
        if (t == 0) return 1.0;
        check_step(t);
        return alpha_bar_[t - 1];
    }
    double beta_tilde(int t) const { check_step(t); return beta_tilde_[t - 1]; }

private:
    void check_step(int t) const;

    std::vector<double> beta_;
    std::vector<double> alpha_;
    std::vector<double> alpha_bar_;
    std::vector<double> beta_tilde_;
};

/// Linear beta ramp from beta_start (t=1) to beta_end (t=T).
DiffusionSchedule make_linear_schedule(int steps, double beta_start, double beta_end);

/// Closed-form forward jump: sqrt(alpha_bar_t) x0 + sqrt(1 - alpha_bar_t) eps.
ImageTensor forward_sample(const DiffusionSchedule& sched, const ImageTensor& x0,
                           int t, const ImageTensor& eps);

/// Mean and variance of the reverse-step Gaussian q(x_{t-1} | x_t, x0_hat):
///   mean = sqrt(alpha_bar_{t-1}) beta_t / (1 - alpha_bar_t) * x0_hat
///        + sqrt(alpha_t) (1 - alpha_bar_{t-1}) / (1 - alpha_bar_t) * x_t
///   var  = beta_tilde_t
/// At t == 1 this collapses to (x0_hat, 0).
std::pair<ImageTensor, double> posterior_params(const DiffusionSchedule& sched,
                                                const ImageTensor& x0_hat,
                                                const ImageTensor& x_t, int t);

}  // namespace diffrestore

#endif  // DIFFRESTORE_SCHEDULE_HPP
