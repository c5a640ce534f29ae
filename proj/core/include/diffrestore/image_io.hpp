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

#ifndef DIFFRESTORE_IMAGE_IO_HPP
#define DIFFRESTORE_IMAGE_IO_HPP

#include <cstdint>
#include <filesystem>

#include "diffrestore/tensor.hpp"

namespace diffrestore {

/// Reads an 8-bit PNG (gray or RGB, alpha stripped) or binary PGM (P5).
/// Pixel bytes map to [-1, 1] via v / 127.5 - 1.
ImageTensor load_image(const std::filesystem::path& path);

/// Writes a 1-channel image as PGM or gray PNG, a 3-channel image as RGB
/// PNG, chosen by extension (.pgm / .png). Values are clamped to [-1, 1] and
/// quantized with round-half-to-even, so a load/save round trip is
/// byte-identical.
void save_image(const std::filesystem::path& path, const ImageTensor& img);

/// Quantization used at export time: clamp to [-1,1], map to [0,255],
/// ties-to-even.
uint8_t quantize_u8(double v);

/// Reads a PGM mask (maxval 1 or 255); nonzero bytes become 1.0, zero stays
/// 0.0. Returned tensor has one channel.
ImageTensor load_mask_pgm(const std::filesystem::path& path);

}  // namespace diffrestore

#endif  // DIFFRESTORE_IMAGE_IO_HPP
