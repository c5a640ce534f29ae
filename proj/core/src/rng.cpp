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

#include "diffrestore/rng.hpp"

#include <cmath>
#include <numbers>

namespace diffrestore {

uint64_t splitmix64(uint64_t state) {
    uint64_t z = state + 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

uint64_t NoiseStream::bits(uint64_t stream, uint64_t counter) const {
    // Chain three rounds so (seed, stream, counter) mix into 64 bits with no
    // visible lattice structure between adjacent counters.
    uint64_t k = splitmix64(seed_ ^ 0xa5a5a5a5a5a5a5a5ULL);
    k = splitmix64(k ^ stream);
    k = splitmix64(k ^ counter);
    return k;
}

double NoiseStream::uniform(uint64_t stream, uint64_t counter) const {
    // Top 53 bits -> (0,1): offset by 2^-54 keeps log() away from zero.
    const uint64_t b = bits(stream, counter);
    return static_cast<double>(b >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

double NoiseStream::normal(uint64_t stream, uint64_t counter) const {
    const double u1 = uniform(stream, 2 * counter);
    const double u2 = uniform(stream, 2 * counter + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

ImageTensor NoiseStream::normal_field(int channels, int height, int width,
                                      uint64_t stream, uint64_t counter_base) const {
    ImageTensor out(channels, height, width, 0.0);
    for (size_t i = 0; i < out.data.size(); ++i) {
        out.data[i] = normal(stream, counter_base + i);
    }
    return out;
}

}  // namespace diffrestore
