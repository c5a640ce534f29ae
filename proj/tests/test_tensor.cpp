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
#include <random>

#include <doctest.h>

#include "diffrestore/errors.hpp"
#include "diffrestore/tensor.hpp"
#include "support/oracles.hpp"

using namespace diffrestore;

namespace {

double max_abs_diff(const ImageTensor& a, const ImageTensor& b) {
    double m = 0.0;
    for (size_t i = 0; i < a.data.size(); ++i) {
        m = std::max(m, std::abs(a.data[i] - b.data[i]));
    }
    return m;
}

}  // namespace

TEST_CASE("conv2d: 1x1 identity kernel is the identity") {
    std::mt19937_64 rng(11);
    const ImageTensor x = oracles::random_image(rng, 1, 4, 4);
    KernelBank k(1, 1, 1, 0.0);
    k.at(0, 0, 0, 0) = 1.0;
    const ImageTensor out = conv2d(x, k);
    CHECK(max_abs_diff(out, x) == 0.0);
}

TEST_CASE("conv2d: replicate padding preserves constants") {
    std::mt19937_64 rng(12);
    const double c = 0.37;
    const ImageTensor x(2, 5, 6, c);
    const KernelBank k = oracles::random_kernel(rng, 2, 2, 3);
    double wsum[2] = {0.0, 0.0};
    for (int o = 0; o < 2; ++o) {
        for (int i = 0; i < 2; ++i) {
            for (int dy = 0; dy < 3; ++dy) {
                for (int dx = 0; dx < 3; ++dx) wsum[o] += k.at(o, i, dy, dx);
            }
        }
    }
    const ImageTensor out = conv2d(x, k);
    for (int o = 0; o < 2; ++o) {
        for (int y = 0; y < 5; ++y) {
            for (int x2 = 0; x2 < 6; ++x2) {
                CHECK(out.at(o, y, x2) == doctest::Approx(c * wsum[o]).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("conv2d matches the padded-buffer oracle") {
    std::mt19937_64 rng(13);
    SUBCASE("random 2x5x5 input with 2x2x3x3 kernel") {
        const ImageTensor x = oracles::random_image(rng, 2, 5, 5);
        const KernelBank k = oracles::random_kernel(rng, 2, 2, 3);
        CHECK(max_abs_diff(conv2d(x, k), oracles::conv_oracle(x, k)) < 1e-12);
    }
    SUBCASE("sweep of shapes up to 3x8x8 with kernels up to 5x5") {
        for (int cin : {1, 2, 3}) {
            for (int cout : {1, 3}) {
                for (int h : {1, 4, 8}) {
                    for (int w : {1, 5, 8}) {
                        for (int ks : {1, 3, 5}) {
                            const ImageTensor x = oracles::random_image(rng, cin, h, w);
                            const KernelBank k = oracles::random_kernel(rng, cout, cin, ks);
                            CHECK(max_abs_diff(conv2d(x, k), oracles::conv_oracle(x, k)) < 1e-12);
                        }
                    }
                }
            }
        }
    }
}

TEST_CASE("conv2d rejects channel mismatch") {
    const ImageTensor x(2, 4, 4, 0.0);
    const KernelBank k(1, 3, 3, 0.1);
    CHECK_THROWS_AS(conv2d(x, k), DimensionError);
    CHECK_THROWS_AS(conv2d_adjoint_input(x, k), DimensionError);
}

TEST_CASE("conv2d is deterministic") {
    std::mt19937_64 rng(14);
    const ImageTensor x = oracles::random_image(rng, 3, 7, 7);
    const KernelBank k = oracles::random_kernel(rng, 3, 3, 5);
    const ImageTensor a = conv2d(x, k);
    const ImageTensor b = conv2d(x, k);
    CHECK(a.data == b.data);
}

TEST_CASE("conv2d_adjoint_input: identity and zero cases") {
    std::mt19937_64 rng(15);
    KernelBank ident(1, 1, 1, 0.0);
    ident.at(0, 0, 0, 0) = 1.0;
    const ImageTensor g = oracles::random_image(rng, 1, 4, 5);
    CHECK(max_abs_diff(conv2d_adjoint_input(g, ident), g) == 0.0);

    const ImageTensor zero(2, 4, 4, 0.0);
    const KernelBank k = oracles::random_kernel(rng, 2, 2, 3);
    const ImageTensor adj = conv2d_adjoint_input(zero, k);
    for (double v : adj.data) CHECK(v == 0.0);
}

TEST_CASE("adjoint identity <Kx,u> == <x,K^T u> over 200 random triples") {
    std::mt19937_64 rng(16);
    for (int trial = 0; trial < 200; ++trial) {
        const int cin = 1 + static_cast<int>(rng() % 3);
        const int cout = 1 + static_cast<int>(rng() % 3);
        const int h = 2 + static_cast<int>(rng() % 6);
        const int w = 2 + static_cast<int>(rng() % 6);
        const int ks = 1 + 2 * static_cast<int>(rng() % 3);
        const ImageTensor x = oracles::random_image(rng, cin, h, w);
        const ImageTensor u = oracles::random_image(rng, cout, h, w);
        const KernelBank k = oracles::random_kernel(rng, cout, cin, ks);
        const double lhs = dot(conv2d(x, k), u);
        const double rhs = dot(x, conv2d_adjoint_input(u, k));
        CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(lhs)));
    }
}

TEST_CASE("conv2d_grad_kernel") {
    std::mt19937_64 rng(17);
    SUBCASE("zero input gives zero gradient") {
        const ImageTensor x(2, 5, 5, 0.0);
        const ImageTensor g = oracles::random_image(rng, 2, 5, 5);
        const KernelBank grad = conv2d_grad_kernel(x, g, 2, 2, 3);
        for (double v : grad.weights) CHECK(v == 0.0);
    }
    SUBCASE("matches central finite differences of <conv2d(x,k), g>") {
        const ImageTensor x = oracles::random_image(rng, 2, 6, 6);
        const ImageTensor g = oracles::random_image(rng, 2, 6, 6);
        KernelBank k = oracles::random_kernel(rng, 2, 2, 3);
        const KernelBank analytic = conv2d_grad_kernel(x, g, 2, 2, 3);
        auto objective = [&](const std::vector<double>& w) {
            KernelBank kk = k;
            kk.weights = w;
            return dot(conv2d(x, kk), g);
        };
        const std::vector<double> fd = oracles::finite_difference(objective, k.weights, 1e-5);
        for (size_t i = 0; i < fd.size(); ++i) {
            CHECK(std::abs(analytic.weights[i] - fd[i]) <=
                  1e-6 * std::max(1.0, std::abs(fd[i])));
        }
    }
    SUBCASE("gradient of 0.5||conv(x,k)||^2 equals grad_kernel with g = conv(x,k)") {
        const ImageTensor x = oracles::random_image(rng, 1, 6, 6);
        KernelBank k = oracles::random_kernel(rng, 1, 1, 3);
        const KernelBank analytic = conv2d_grad_kernel(x, conv2d(x, k), 1, 1, 3);
        auto objective = [&](const std::vector<double>& w) {
            KernelBank kk = k;
            kk.weights = w;
            const ImageTensor c = conv2d(x, kk);
            return 0.5 * dot(c, c);
        };
        const std::vector<double> fd = oracles::finite_difference(objective, k.weights, 1e-5);
        for (size_t i = 0; i < fd.size(); ++i) {
            CHECK(std::abs(analytic.weights[i] - fd[i]) <=
                  1e-6 * std::max(1.0, std::abs(fd[i])));
        }
    }
}

TEST_CASE("elementwise suite") {
    std::mt19937_64 rng(18);
    const ImageTensor a = oracles::random_image(rng, 1, 10, 10);
    SUBCASE("mse(a, a) == 0") { CHECK(mse(a, a) == 0.0); }
    SUBCASE("mse([0,0],[2,2]) == 4") {
        const ImageTensor zeros(1, 1, 2, 0.0);
        const ImageTensor twos(1, 1, 2, 2.0);
        CHECK(mse(zeros, twos) == 4.0);
    }
    SUBCASE("dot matches brute-force summation") {
        const ImageTensor u = oracles::random_image(rng, 1, 10, 10);
        double expected = 0.0;
        for (size_t i = 0; i < a.data.size(); ++i) expected += a.data[i] * u.data[i];
        CHECK(dot(a, u) == doctest::Approx(expected).epsilon(1e-12));
    }
    SUBCASE("add/sub/scale") {
        const ImageTensor u = oracles::random_image(rng, 1, 10, 10);
        const ImageTensor s = sub(add(a, u), u);
        CHECK(max_abs_diff(s, a) < 1e-15);
        const ImageTensor doubled = scale(a, 2.0);
        for (size_t i = 0; i < a.data.size(); ++i) {
            CHECK(doubled.data[i] == 2.0 * a.data[i]);
        }
    }
    SUBCASE("shape mismatch throws") {
        const ImageTensor b(1, 9, 10, 0.0);
        CHECK_THROWS_AS(add(a, b), DimensionError);
        CHECK_THROWS_AS(mse(a, b), DimensionError);
        CHECK_THROWS_AS(dot(a, b), DimensionError);
    }
}

TEST_CASE("KernelBank rejects even sizes") {
    CHECK_THROWS_AS(KernelBank(1, 1, 4, 0.0), DimensionError);
}
