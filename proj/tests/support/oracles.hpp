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

// Independent reference implementations the tests check the library against.
// Everything here is deliberately written via a different mechanism than the
// production code (padded buffers instead of clamped indexing, scalar
// recursions instead of tensor ops).

#ifndef DIFFRESTORE_TESTS_ORACLES_HPP
#define DIFFRESTORE_TESTS_ORACLES_HPP

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "diffrestore/schedule.hpp"
#include "diffrestore/tensor.hpp"

namespace oracles {

using diffrestore::DiffusionSchedule;
using diffrestore::ImageTensor;
using diffrestore::KernelBank;

// --- deterministic random instances -------------------------------------

inline double urand(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double urand_signed(std::mt19937_64& rng) { return 2.0 * urand(rng) - 1.0; }

inline ImageTensor random_image(std::mt19937_64& rng, int c, int h, int w, double lo = -1.0,
                                double hi = 1.0) {
    ImageTensor img(c, h, w, 0.0);
    for (double& v : img.data) v = lo + (hi - lo) * urand(rng);
    return img;
}

inline KernelBank random_kernel(std::mt19937_64& rng, int out_c, int in_c, int k) {
    KernelBank bank(out_c, in_c, k, 0.0);
    for (double& w : bank.weights) w = urand_signed(rng);
    return bank;
}

// --- convolution via materialized replicate padding ----------------------

inline ImageTensor conv_oracle(const ImageTensor& x, const KernelBank& k) {
    const int H = x.height, W = x.width, half = k.size / 2;
    const int ph = H + 2 * half, pw = W + 2 * half;
    // Materialize the replicate-padded input, then convolve without any
    // index clamping.
    std::vector<double> padded(static_cast<size_t>(x.channels) * ph * pw);
    for (int c = 0; c < x.channels; ++c) {
        for (int y = 0; y < ph; ++y) {
            const int sy = std::min(std::max(y - half, 0), H - 1);
            for (int xx = 0; xx < pw; ++xx) {
                const int sx = std::min(std::max(xx - half, 0), W - 1);
                padded[(static_cast<size_t>(c) * ph + y) * pw + xx] = x.at(c, sy, sx);
            }
        }
    }
    ImageTensor out(k.out_channels, H, W, 0.0);
    for (int o = 0; o < k.out_channels; ++o) {
        for (int y = 0; y < H; ++y) {
            for (int xx = 0; xx < W; ++xx) {
                double acc = 0.0;
                for (int i = 0; i < k.in_channels; ++i) {
                    for (int ky = 0; ky < k.size; ++ky) {
                        for (int kx = 0; kx < k.size; ++kx) {
                            acc += k.at(o, i, ky, kx) *
                                   padded[(static_cast<size_t>(i) * ph + y + ky) * pw + xx + kx];
                        }
                    }
                }
                out.at(o, y, xx) = acc;
            }
        }
    }
    return out;
}

// --- central finite differences ------------------------------------------

inline std::vector<double> finite_difference(const std::function<double(const std::vector<double>&)>& f,
                                             std::vector<double> params, double step) {
    std::vector<double> grad(params.size());
    for (size_t i = 0; i < params.size(); ++i) {
        const double saved = params[i];
        params[i] = saved + step;
        const double hi = f(params);
        params[i] = saved - step;
        const double lo = f(params);
        params[i] = saved;
        grad[i] = (hi - lo) / (2.0 * step);
    }
    return grad;
}

// --- 1-D Gaussian posterior of the reverse step ---------------------------

struct ScalarPosterior {
    double mean;
    double var;
};

/// q(x_{t-1} | x_t, x0) by direct product of the two Gaussians
/// q(x_t | x_{t-1}) and q(x_{t-1} | x0).
inline ScalarPosterior scalar_bayes_posterior(const DiffusionSchedule& sched, double x0,
                                              double x_t, int t) {
    const double alpha_t = sched.alpha(t);
    const double beta_t = sched.beta(t);
    const double ab_prev = sched.alpha_bar(t - 1);
    const double like_prec = alpha_t / beta_t;            // from N(sqrt(a_t) x_{t-1}, b_t)
    const double prior_prec = 1.0 / (1.0 - ab_prev);      // from N(sqrt(ab') x0, 1-ab')
    const double prec = like_prec + prior_prec;
    const double mean =
        (std::sqrt(alpha_t) * x_t / beta_t + std::sqrt(ab_prev) * x0 / (1.0 - ab_prev)) / prec;
    return {mean, 1.0 / prec};
}

/// Exact per-pixel law of the guided chain for a single-Gaussian prior and
/// an identity degradation with fixed scale: every transition is affine in
/// x_t, so mean and variance propagate in closed form.
struct AffineChainLaw {
    std::vector<double> mean;  // per pixel
    double var;                // shared across pixels
};

inline AffineChainLaw guided_chain_law(const DiffusionSchedule& sched, double prior_var,
                                       const std::vector<double>& prior_mean,
                                       const std::vector<double>& y, double s, size_t n_total) {
    const int T = sched.steps();
    const size_t n = prior_mean.size();
    AffineChainLaw law;
    law.mean.assign(n, 0.0);  // x_T ~ N(0, I)
    law.var = 1.0;
    for (int t = T; t >= 1; --t) {
        const double ab = sched.alpha_bar(t);
        const double ab_prev = sched.alpha_bar(t - 1);
        const double beta_t = sched.beta(t);
        const double vp = ab * prior_var + (1.0 - ab);
        // exact denoiser: x0_hat = alpha_x * x_t + gamma (per pixel)
        const double alpha_x = std::sqrt(ab) * prior_var / vp;
        const double gamma0 = (1.0 - ab) / vp;
        // guidance shift: x0_hat' = (1 - kappa) x0_hat + kappa y
        const double shift_coef = s * (1.0 - ab) / (std::sqrt(ab_prev) * beta_t);
        const double kappa = shift_coef * 2.0 / static_cast<double>(n_total);
        // posterior mean: a * x0_hat' + b * x_t
        const double a = (t == 1) ? 1.0 : std::sqrt(ab_prev) * beta_t / (1.0 - ab);
        const double b = (t == 1) ? 0.0
                                  : std::sqrt(sched.alpha(t)) * (1.0 - ab_prev) / (1.0 - ab);
        const double A = a * (1.0 - kappa) * alpha_x + b;
        const double var_add = (t == 1) ? 0.0 : sched.beta_tilde(t);
        for (size_t p = 0; p < n; ++p) {
            const double B = a * ((1.0 - kappa) * gamma0 * prior_mean[p] + kappa * y[p]);
            law.mean[p] = A * law.mean[p] + B;
        }
        law.var = A * A * law.var + var_add;
    }
    return law;
}

}  // namespace oracles

#endif  // DIFFRESTORE_TESTS_ORACLES_HPP
