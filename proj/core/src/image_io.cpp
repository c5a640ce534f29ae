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

#include "diffrestore/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include <png.h>

#include "diffrestore/errors.hpp"

namespace diffrestore {

namespace {

constexpr double kScale = 127.5;

double byte_to_signal(uint8_t b) { return static_cast<double>(b) / kScale - 1.0; }

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

bool has_pgm_magic(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    char magic[2] = {0, 0};
    in.read(magic, 2);
    return in && magic[0] == 'P' && magic[1] == '5';
}

int pgm_next_int(std::istream& in) {
    // Skips whitespace and '#' comments between header tokens.
    int ch = in.get();
    while (in) {
        if (ch == '#') {
            while (in && ch != '\n') ch = in.get();
        } else if (!std::isspace(ch)) {
            break;
        }
        ch = in.get();
    }
    if (!in) throw IoError("PGM: truncated header");
    int value = 0;
    bool any = false;
    while (in && std::isdigit(ch)) {
        value = value * 10 + (ch - '0');
        any = true;
        ch = in.get();
    }
    if (!any) throw IoError("PGM: malformed header token");
    return value;
}

ImageTensor load_pgm(const std::filesystem::path& path, bool as_mask) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    char magic[2];
    in.read(magic, 2);
    if (!in || magic[0] != 'P' || magic[1] != '5') {
        throw IoError(path.string() + ": not a binary PGM (P5)");
    }
    const int w = pgm_next_int(in);
    const int h = pgm_next_int(in);
    const int maxval = pgm_next_int(in);
    if (w <= 0 || h <= 0) throw IoError(path.string() + ": bad PGM dimensions");
    if (maxval <= 0 || maxval > 255) {
        throw IoError(path.string() + ": PGM maxval " + std::to_string(maxval) + " unsupported");
    }
    std::vector<uint8_t> bytes(static_cast<size_t>(w) * h);
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!in) throw IoError(path.string() + ": truncated PGM payload");
    ImageTensor img(1, h, w, 0.0);
    for (size_t i = 0; i < bytes.size(); ++i) {
        img.data[i] = as_mask ? (bytes[i] > 0 ? 1.0 : 0.0) : byte_to_signal(bytes[i]);
    }
    return img;
}

ImageTensor load_png(const std::filesystem::path& path) {
    FilePtr fp(std::fopen(path.string().c_str(), "rb"));
    if (!fp) throw IoError("cannot open " + path.string());

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("libpng: read struct allocation failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw IoError("libpng: info struct allocation failed");
    }
    std::vector<uint8_t> interleaved;
    int w = 0, h = 0, channels = 0;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError(path.string() + ": PNG decode failed");
    }
    png_init_io(png, fp.get());
    png_read_info(png, info);

    png_set_strip_16(png);
    png_set_packing(png);
    const int color_type = png_get_color_type(png, info);
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8) {
        png_set_expand_gray_1_2_4_to_8(png);
    }
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    png_read_update_info(png, info);

    w = static_cast<int>(png_get_image_width(png, info));
    h = static_cast<int>(png_get_image_height(png, info));
    channels = png_get_channels(png, info);
    if (channels != 1 && channels != 3) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError(path.string() + ": unsupported PNG channel count " +
                      std::to_string(channels));
    }
    interleaved.resize(static_cast<size_t>(w) * h * channels);
    std::vector<png_bytep> rows(h);
    for (int y = 0; y < h; ++y) {
        rows[y] = interleaved.data() + static_cast<size_t>(y) * w * channels;
    }
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    ImageTensor img(channels, h, w, 0.0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            for (int c = 0; c < channels; ++c) {
                img.at(c, y, x) =
                    byte_to_signal(interleaved[(static_cast<size_t>(y) * w + x) * channels + c]);
            }
        }
    }
    return img;
}

void save_png(const std::filesystem::path& path, const ImageTensor& img) {
    FilePtr fp(std::fopen(path.string().c_str(), "wb"));
    if (!fp) throw IoError("cannot open " + path.string() + " for writing");

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("libpng: write struct allocation failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("libpng: info struct allocation failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError(path.string() + ": PNG encode failed");
    }
    png_init_io(png, fp.get());
    const int color = img.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB;
    png_set_IHDR(png, info, img.width, img.height, 8, color, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    std::vector<uint8_t> row(static_cast<size_t>(img.width) * img.channels);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            for (int c = 0; c < img.channels; ++c) {
                row[static_cast<size_t>(x) * img.channels + c] = quantize_u8(img.at(c, y, x));
            }
        }
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

void save_pgm(const std::filesystem::path& path, const ImageTensor& img) {
    if (img.channels != 1) {
        throw IoError("PGM output requires a 1-channel image, got " +
                      std::to_string(img.channels));
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << "P5\n" << img.width << " " << img.height << "\n255\n";
    std::vector<uint8_t> bytes(img.size());
    for (size_t i = 0; i < img.data.size(); ++i) bytes[i] = quantize_u8(img.data[i]);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace

uint8_t quantize_u8(double v) {
    const double clamped = std::clamp(v, -1.0, 1.0);
    // nearbyint under the default FP environment rounds ties to even.
    const double r = std::nearbyint((clamped + 1.0) * kScale);
    return static_cast<uint8_t>(r);
}

ImageTensor load_image(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) {
        throw IoError("no such file: " + path.string());
    }
    if (has_pgm_magic(path)) return load_pgm(path, /*as_mask=*/false);
    return load_png(path);
}

void save_image(const std::filesystem::path& path, const ImageTensor& img) {
    const auto ext = path.extension().string();
    if (ext == ".pgm") {
        save_pgm(path, img);
    } else if (ext == ".png") {
        save_png(path, img);
    } else {
        throw IoError("unsupported output extension '" + ext + "' (use .png or .pgm)");
    }
}

ImageTensor load_mask_pgm(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) {
        throw IoError("no such file: " + path.string());
    }
    return load_pgm(path, /*as_mask=*/true);
}

}  // namespace diffrestore
