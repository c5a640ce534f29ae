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

#include <cmath>
#include <numbers>
#include <random>

#include <doctest.h>

#include "diffrestore/degradation.hpp"
#include "diffrestore/errors.hpp"
#include "diffrestore/guidance.hpp"
#include "diffrestore/prior.hpp"
#include "diffrestore/rng.hpp"
#include "support/oracles.hpp"

using namespace diffrestore;

TEST_CASE("adaptive_scale: orthogonal correction leaves the scale unchanged") {
    GuidanceState state;
    state.prev_scale = 7.5;
    state.s_min = 0.0;
    state.s_max = 1e9;
    state.prev_mean = ImageTensor(1, 1, 2, 0.0);
    ImageTensor x_t(1, 1, 2, 0.0);
    x_t.data = {1.0, 0.0};
    ImageTensor grad(1, 1, 2, 0.0);
    grad.data = {0.0, 3.0};  // orthogonal to x_t - prev_mean
    CHECK(adaptive_scale(state, x_t, grad, 0.42) == doctest::Approx(7.5).epsilon(1e-15));
}

TEST_CASE("adaptive_scale: dot term equal to the loss doubles the scale") {
    GuidanceState state;
    state.prev_scale = 4.0;
    state.s_min = 0.0;
    state.s_max = 1e9;
    state.prev_mean = ImageTensor(1, 1, 1, 0.0);
    const ImageTensor x_t(1, 1, 1, 0.5);
    const ImageTensor grad(1, 1, 1, 1.0);  // dot = 0.5 = loss
    CHECK(adaptive_scale(state, x_t, grad, 0.5) == doctest::Approx(8.0).epsilon(1e-15));
}

TEST_CASE("adaptive_scale: missing previous mean returns the clamped initial scale") {
    GuidanceState state;
    state.s_init = 123.0;
    state.s_min = 1.0;
    state.s_max = 50.0;
    const ImageTensor x_t(1, 1, 1, 0.0);
    CHECK(adaptive_scale(state, x_t, x_t, 1.0) == 50.0);
}

TEST_CASE("adaptive_scale: output is always clamped to [s_min, s_max]") {
    std::mt19937_64 rng(61);
    GuidanceState state;
    state.s_min = 1.0;
    state.s_max = 100.0;
    state.prev_mean = ImageTensor(1, 2, 2, 0.0);
    for (int trial = 0; trial < 200; ++trial) {
        state.prev_scale = oracles::urand(rng) * 200.0;
        const ImageTensor x_t = oracles::random_image(rng, 1, 2, 2, -3.0, 3.0);
        const ImageTensor grad = oracles::random_image(rng, 1, 2, 2, -10.0, 10.0);
        const double loss = oracles::urand(rng) * 0.1 + 1e-4;
        const double s = adaptive_scale(state, x_t, grad, loss);
        CHECK(s >= 1.0);
        CHECK(s <= 100.0);
    }
}

TEST_CASE("adaptive_scale rejects non-positive loss") {
    GuidanceState state;
    state.prev_scale = 1.0;
    state.prev_mean = ImageTensor(1, 1, 1, 0.0);
    const ImageTensor x_t(1, 1, 1, 1.0);
    CHECK_THROWS_AS(adaptive_scale(state, x_t, x_t, 0.0), GuidanceError);
    CHECK_THROWS_AS(adaptive_scale(state, x_t, x_t, -1.0), GuidanceError);
}

TEST_CASE("guidance_shift") {
    const DiffusionSchedule sched = make_linear_schedule(100, 1e-3, 0.02);
    std::mt19937_64 rng(62);
    const ImageTensor x0 = oracles::random_image(rng, 1, 3, 3);
    const ImageTensor grad = oracles::random_image(rng, 1, 3, 3);
    SUBCASE("s = 0 leaves x0_hat unchanged") {
        CHECK(guidance_shift(x0, grad, 0.0, sched, 50).data == x0.data);
    }
    SUBCASE("zero gradient leaves x0_hat unchanged") {
        const ImageTensor zero(1, 3, 3, 0.0);
        CHECK(guidance_shift(x0, zero, 3.0, sched, 50).data == x0.data);
    }
}

TEST_CASE("mean-shift equivalence: shifted posterior mean moves by exactly -s * grad") {
    const DiffusionSchedule sched = make_linear_schedule(100, 1e-4, 0.02);
    std::mt19937_64 rng(63);
    for (int t : {2, 50, 100}) {
        for (double s : {1.0, 7.0, 2000.0}) {
            const ImageTensor x0 = oracles::random_image(rng, 1, 3, 3);
            const ImageTensor x_t = oracles::random_image(rng, 1, 3, 3);
            const ImageTensor grad = oracles::random_image(rng, 1, 3, 3);
            const ImageTensor shifted = guidance_shift(x0, grad, s, sched, t);
            const auto [mean_before, var_b] = posterior_params(sched, x0, x_t, t);
            const auto [mean_after, var_a] = posterior_params(sched, shifted, x_t, t);
            CHECK(var_a == var_b);
            for (size_t i = 0; i < grad.data.size(); ++i) {
                const double expected = -s * grad.data[i];
                const double actual = mean_after.data[i] - mean_before.data[i];
                CHECK(std::abs(actual - expected) <= 1e-12 * std::max(1.0, std::abs(expected)));
            }
        }
    }
}

TEST_CASE("g_term") {
    SUBCASE("s = 0 gives zero") {
        const ImageTensor grad(1, 1, 2, 3.0);
        for (double v : g_term(0.0, grad).data) CHECK(v == 0.0);
    }
    SUBCASE("s = 2 on [1,-1] gives [-2,2]") {
        ImageTensor grad(1, 1, 2, 0.0);
        grad.data = {1.0, -1.0};
        const ImageTensor g = g_term(2.0, grad);
        CHECK(g.data[0] == -2.0);
        CHECK(g.data[1] == 2.0);
    }
    SUBCASE("the raw likelihood-scale formula built from g_term matches adaptive_scale") {
        std::mt19937_64 rng(64);
        GuidanceState state;
        state.prev_scale = 11.0;
        state.s_min = 0.0;
        state.s_max = 1e9;
        state.prev_mean = oracles::random_image(rng, 1, 2, 2);
        const ImageTensor x_t = oracles::random_image(rng, 1, 2, 2);
        const ImageTensor grad = oracles::random_image(rng, 1, 2, 2);
        const double loss = 0.37;
        // s = -[(x_t-mu)^T g + C + log N] / L with g = g_term(s_prev, grad)
        // and C + log N = -s_prev * loss
        const double numerator =
            dot(sub(x_t, *state.prev_mean), g_term(state.prev_scale, grad)) -
            state.prev_scale * loss;
        const double expected = std::clamp(-numerator / loss, state.s_min, state.s_max);
        CHECK(adaptive_scale(state, x_t, grad, loss) ==
              doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("fixed-scale degeneration: zero correction freezes the scale") {
    GuidanceState state;
    state.prev_scale = 42.0;
    state.s_min = 0.0;
    state.s_max = 1e9;
    state.prev_mean = ImageTensor(1, 1, 1, 0.3);
    const ImageTensor x_t(1, 1, 1, 0.3);  // x_t == prev_mean -> dot = 0
    const ImageTensor grad(1, 1, 1, 5.0);
    double s = 42.0;
    for (int i = 0; i < 25; ++i) {
        state.prev_scale = s;
        s = adaptive_scale(state, x_t, grad, 0.1);
    }
    CHECK(s == 42.0);
}

TEST_CASE("scalar toy: the recursion tracks the exact likelihood-scale formula") {
    // 1-D problem where p(y | x_t) is exactly Gaussian: prior x0 ~ N(m, 1),
    // observation y = x0 + N(0, tau^2), identity degradation. The exact value
    // of -[(x_t-mu) g + C + log N] / L is computable in closed form, with
    // g and C the Taylor quantities at mu and N = p(y | x_{t+1}).
    const DiffusionSchedule sched = make_linear_schedule(60, 1e-6, 5e-4);
    const double m = 0.2;
    const double sigma2 = 1.0;  // with unit prior variance, v' = 1 for all t
    const double tau2 = 1.0 / (2.0 * std::numbers::pi) - 1e-3;  // log-normalizer ~ 0

    const NoiseStream stream(77);
    const double x0_true = m + 0.3;
    const double y = x0_true + 1.0;  // a large fixed residual keeps L well away from 0

    GaussianMixturePrior prior({{1.0, ImageTensor(1, 1, 1, m), sigma2}});
    const DegradationModel identity = init_model(1, 1, 1, 1, KernelInit::kIdentity);
    const ImageTensor y_img(1, 1, 1, y);

    auto denoise = [&](double x, int t) {
        const double ab = sched.alpha_bar(t);
        const double vp = ab * sigma2 + 1.0 - ab;
        return (std::sqrt(ab) * sigma2 * x + (1.0 - ab) * m) / vp;
    };
    auto log_p_y_given_xt = [&](double x, int t) {
        const double ab = sched.alpha_bar(t);
        const double vp = ab * sigma2 + 1.0 - ab;
        const double v0 = sigma2 * (1.0 - ab) / vp;
        const double total = v0 + tau2;
        const double r = y - denoise(x, t);
        return -0.5 * std::log(2.0 * std::numbers::pi * total) - r * r / (2.0 * total);
    };

    const int t_start = 14;
    double x = std::sqrt(sched.alpha_bar(t_start)) * x0_true +
               std::sqrt(1.0 - sched.alpha_bar(t_start)) * stream.normal(2, 0);
    double x_prev = x;  // plays x_{t+1} in the normalizer
    std::optional<double> mu;

    GuidanceState state;
    state.s_min = 0.0;
    state.s_max = 1e9;
    double s_rec = 0.0;
    double s_exact = 0.0;
    bool initialized = false;

    for (int t = t_start; t >= 3; --t) {
        const ImageTensor x_img(1, 1, 1, x);
        const ImageTensor eps = prior.predict(x_img, t, sched);
        const ImageTensor x0_hat = predict_x0(sched, x_img, eps, t);
        const DegradationGrads grads = loss_and_grads(identity, x0_hat, y_img);
        const ImageTensor grad_xt = grad_wrt_xt(grads.grad_x, sched, t);

        if (mu.has_value()) {
            // exact Taylor quantities at the expansion point mu
            const double ab = sched.alpha_bar(t);
            const double vp = ab * sigma2 + 1.0 - ab;
            const double v0 = sigma2 * (1.0 - ab) / vp;
            const double alpha = std::sqrt(ab) * sigma2 / vp;  // d x0_hat / d x_t
            const double g_exact = (y - denoise(*mu, t)) * alpha / (v0 + tau2);
            const double c_exact = log_p_y_given_xt(*mu, t);
            const double log_n = log_p_y_given_xt(x_prev, t + 1);
            s_exact = -((x - *mu) * g_exact + c_exact + log_n) / grads.loss;

            if (!initialized) {
                s_rec = s_exact;  // pre-register the starting scale once
                initialized = true;
            } else {
                state.prev_scale = s_rec;
                state.prev_mean = ImageTensor(1, 1, 1, *mu);
                s_rec = adaptive_scale(state, x_img, grad_xt, grads.loss);
            }
        }

        const auto [mean, var] = posterior_params(sched, x0_hat, x_img, t);
        x_prev = x;
        mu = mean.data[0];
        x = mean.data[0] + std::sqrt(var) * stream.normal(3, static_cast<uint64_t>(t));
    }

    REQUIRE(initialized);
    CHECK(s_exact > 0.0);
    CHECK(std::abs(s_rec - s_exact) <= 0.10 * std::abs(s_exact));
}

TEST_CASE("grad_wrt_xt applies the 1/sqrt(alpha_bar) chain factor") {
    const DiffusionSchedule sched = make_linear_schedule(50, 1e-3, 0.05);
    std::mt19937_64 rng(65);
    const ImageTensor grad = oracles::random_image(rng, 1, 2, 2);
    const int t = 30;
    const ImageTensor out = grad_wrt_xt(grad, sched, t);
    for (size_t i = 0; i < grad.data.size(); ++i) {
        CHECK(out.data[i] ==
              doctest::Approx(grad.data[i] / std::sqrt(sched.alpha_bar(t))).epsilon(1e-15));
    }
}
