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

#ifndef DIFFRESTORE_RNG_HPP
#define DIFFRESTORE_RNG_HPP

#include <cstdint>

#include "diffrestore/tensor.hpp"

namespace diffrestore {

/// Identifier of the noise-stream construction; recorded in run metadata so
/// outputs stay comparable across builds.
inline constexpr const char* kNoiseStreamName = "splitmix64-boxmuller/1";

/// Counter-based Gaussian stream: each draw is a pure function of
/// (seed, stream, counter), so sampling needs no mutable generator state
/// and any draw can be reproduced in isolation.
///
/// Uniform bits come from SplitMix64 applied to the mixed key; pairs of
/// uniforms are turned into one standard normal via the Box-Muller cosine
/// branch.
class NoiseStream {
public:
    explicit NoiseStream(uint64_t seed) : seed_(seed) {}

    uint64_t seed() const { return seed_; }

    /// Standard normal draw at (stream, counter).
    double normal(uint64_t stream, uint64_t counter) const;

    /// Uniform draw in (0, 1) at (stream, counter).
    double uniform(uint64_t stream, uint64_t counter) const;

    /// Raw 64 mixed bits at (stream, counter).
    uint64_t bits(uint64_t stream, uint64_t counter) const;

    /// C x H x W field of iid standard normals; element i uses counter
    /// base + i within `stream`.
    ImageTensor normal_field(int channels, int height, int width,
                             uint64_t stream, uint64_t counter_base = 0) const;

private:
    uint64_t seed_;
};

/// SplitMix64 mix function, exposed for seed-derivation helpers.
uint64_t splitmix64(uint64_t state);

}  // namespace diffrestore

#endif  // DIFFRESTORE_RNG_HPP
