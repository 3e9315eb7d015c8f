// Copyright 2026 The docqa Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "docqa/gray_image.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <iterator>
#include <numeric>
#include <string>

#include "docqa/error.hpp"

namespace docqa {

namespace {

void check_dims(int width, int height) {
    if (width < 1 || height < 1) {
        throw ParameterError("image dimensions must be positive, got " + std::to_string(width) +
                             "x" + std::to_string(height));
    }
}

}  // namespace

GrayImage::GrayImage(int width, int height, std::uint8_t fill)
    : width_(width), height_(height) {
    check_dims(width, height);
    pixels_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

GrayImage::GrayImage(int width, int height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
    check_dims(width, height);
    if (pixels_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
        throw ParameterError("pixel buffer does not match image dimensions");
    }
}

std::uint8_t GrayImage::clamped(int x, int y) const {
    return at(std::clamp(x, 0, width_ - 1), std::clamp(y, 0, height_ - 1));
}

GrayImage GrayImage::crop(int x, int y, int w, int h) const {
    if (x < 0 || y < 0 || w < 1 || h < 1 || x + w > width_ || y + h > height_) {
        throw ParameterError("crop rectangle outside image");
    }
    GrayImage out(w, h);
    for (int row = 0; row < h; ++row) {
        const auto* src = &pixels_[index(x, y + row)];
        std::copy(src, src + w, &out.pixels_[out.index(0, row)]);
    }
    return out;
}

void GrayImage::paste(const GrayImage& src, int x, int y) {
    const int x0 = std::max(0, x);
    const int y0 = std::max(0, y);
    const int x1 = std::min(width_, x + src.width());
    const int y1 = std::min(height_, y + src.height());
    for (int row = y0; row < y1; ++row) {
        for (int col = x0; col < x1; ++col) {
            at(col, row) = src.at(col - x, row - y);
        }
    }
}

double GrayImage::mean() const {
    const auto sum = std::accumulate(pixels_.begin(), pixels_.end(), std::uint64_t{0});
    return static_cast<double>(sum) / static_cast<double>(pixels_.size());
}

std::vector<std::uint8_t> encode_pgm(const GrayImage& img) {
    const std::string header =
        "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.insert(out.end(), img.pixels().begin(), img.pixels().end());
    return out;
}

GrayImage decode_pgm(std::span<const std::uint8_t> bytes) {
    std::size_t pos = 0;
    auto skip_space = [&] {
        while (pos < bytes.size()) {
            if (bytes[pos] == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
            } else if (std::isspace(bytes[pos])) {
                ++pos;
            } else {
                break;
            }
        }
    };
    auto read_int = [&] {
        skip_space();
        const char* first = reinterpret_cast<const char*>(bytes.data()) + pos;
        const char* last = reinterpret_cast<const char*>(bytes.data()) + bytes.size();
        int value = 0;
        auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc{} || ptr == first) throw DataError("malformed PGM header");
        pos += static_cast<std::size_t>(ptr - first);
        return value;
    };

    if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
        throw DataError("not a binary PGM (P5) file");
    }
    pos = 2;
    const int width = read_int();
    const int height = read_int();
    const int maxval = read_int();
    if (maxval != 255) throw DataError("unsupported PGM maxval " + std::to_string(maxval));
    if (width < 1 || height < 1) throw DataError("invalid PGM dimensions");
    // exactly one whitespace byte separates the header from the raster
    if (pos >= bytes.size() || !std::isspace(bytes[pos])) throw DataError("malformed PGM header");
    ++pos;
    const auto count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    if (bytes.size() - pos < count) throw DataError("truncated PGM raster");
    std::vector<std::uint8_t> pixels(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                                     bytes.begin() + static_cast<std::ptrdiff_t>(pos + count));
    return GrayImage(width, height, std::move(pixels));
}

GrayImage read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    try {
        return decode_pgm(bytes);
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

void write_pgm(const GrayImage& img, const std::filesystem::path& path) {
    const auto bytes = encode_pgm(img);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DataError("write failed for " + path.string());
}

}  // namespace docqa
