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

#include "docqa/imgproc.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "docqa/error.hpp"

namespace docqa {

namespace {

std::uint8_t quantize(double v) {
    return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

}  // namespace

void BlurSpec::validate() const {
    if (kernel_size < 1 || kernel_size % 2 == 0) {
        throw ParameterError("blur kernel size must be odd and >= 1, got " +
                             std::to_string(kernel_size));
    }
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw ParameterError("blur sigma must be positive");
    }
}

void GridSpec::validate() const {
    if (nx < 1 || ny < 1) throw ParameterError("grid must have at least one piece per axis");
}

void GridSpec::validate_for(const GrayImage& img) const {
    validate();
    if (nx > img.width() || ny > img.height()) {
        throw ParameterError("grid " + std::to_string(nx) + "x" + std::to_string(ny) +
                             " is larger than image " + std::to_string(img.width()) + "x" +
                             std::to_string(img.height()));
    }
}

RealImage::RealImage(int w, int h, double fill)
    : width(w), height(h), values(static_cast<std::size_t>(w) * h, fill) {}

RealImage::RealImage(const GrayImage& img)
    : width(img.width()), height(img.height()), values(img.pixels().begin(), img.pixels().end()) {}

std::vector<double> gaussian_kernel(double sigma, int size) {
    BlurSpec{sigma, size}.validate();
    const int radius = size / 2;
    std::vector<double> taps(static_cast<std::size_t>(size));
    double total = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        const double v = std::exp(-0.5 * (i * i) / (sigma * sigma));
        taps[static_cast<std::size_t>(i + radius)] = v;
        total += v;
    }
    for (auto& t : taps) t /= total;
    return taps;
}

RealImage gaussian_blur_real(const RealImage& img, const BlurSpec& spec) {
    const auto taps = gaussian_kernel(spec.sigma, spec.kernel_size);
    const int radius = spec.kernel_size / 2;
    const int w = img.width;
    const int h = img.height;

    RealImage horiz(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k) {
                acc += taps[static_cast<std::size_t>(k + radius)] *
                       img.at(std::clamp(x + k, 0, w - 1), y);
            }
            horiz.at(x, y) = acc;
        }
    }
    RealImage out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k) {
                acc += taps[static_cast<std::size_t>(k + radius)] *
                       horiz.at(x, std::clamp(y + k, 0, h - 1));
            }
            out.at(x, y) = acc;
        }
    }
    return out;
}

GrayImage gaussian_blur(const GrayImage& img, const BlurSpec& spec) {
    spec.validate();
    const RealImage blurred = gaussian_blur_real(RealImage(img), spec);
    GrayImage out(img.width(), img.height());
    std::transform(blurred.values.begin(), blurred.values.end(), out.pixels().begin(), quantize);
    return out;
}

GrayImage rotate(const GrayImage& img, double angle_deg, std::uint8_t fill) {
    if (!(std::abs(angle_deg) <= 45.0)) {
        throw ParameterError("rotation angle must lie within [-45, 45] degrees");
    }
    if (angle_deg == 0.0) return img;

    const double theta = angle_deg * std::numbers::pi / 180.0;
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const double cx = 0.5 * (img.width() - 1);
    const double cy = 0.5 * (img.height() - 1);

    auto sample = [&](int x, int y) -> double {
        if (x < 0 || y < 0 || x >= img.width() || y >= img.height()) return fill;
        return img.at(x, y);
    };

    GrayImage out(img.width(), img.height());
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            // Inverse map. Image rows grow downwards, so a counter-clockwise
            // turn on screen is a clockwise turn in (x, y) coordinates.
            const double dx = x - cx;
            const double dy = y - cy;
            const double sx = c * dx - s * dy + cx;
            const double sy = s * dx + c * dy + cy;
            if (sx <= -1.0 || sy <= -1.0 || sx >= img.width() || sy >= img.height()) {
                out.at(x, y) = fill;
                continue;
            }
            const int x0 = static_cast<int>(std::floor(sx));
            const int y0 = static_cast<int>(std::floor(sy));
            const double fx = sx - x0;
            const double fy = sy - y0;
            const double top = (1.0 - fx) * sample(x0, y0) + fx * sample(x0 + 1, y0);
            const double bottom = (1.0 - fx) * sample(x0, y0 + 1) + fx * sample(x0 + 1, y0 + 1);
            out.at(x, y) = quantize((1.0 - fy) * top + fy * bottom);
        }
    }
    return out;
}

GrayImage rotate(const GrayImage& img, double angle_deg) {
    return rotate(img, angle_deg, median_intensity(img));
}

int segment_start(int extent, int n, int i) {
    return static_cast<int>(static_cast<long long>(i) * extent / n);
}

std::vector<Segment> divide(const GrayImage& img, const GridSpec& grid) {
    grid.validate_for(img);
    std::vector<Segment> segments;
    segments.reserve(static_cast<std::size_t>(grid.nx) * grid.ny);
    for (int row = 0; row < grid.ny; ++row) {
        const int y0 = segment_start(img.height(), grid.ny, row);
        const int y1 = segment_start(img.height(), grid.ny, row + 1);
        for (int col = 0; col < grid.nx; ++col) {
            const int x0 = segment_start(img.width(), grid.nx, col);
            const int x1 = segment_start(img.width(), grid.nx, col + 1);
            segments.push_back({img.crop(x0, y0, x1 - x0, y1 - y0), x0, y0, col, row});
        }
    }
    return segments;
}

GrayImage resize_bilinear(const GrayImage& img, int new_width, int new_height) {
    if (new_width < 1 || new_height < 1) {
        throw ParameterError("resize target must be at least 1x1");
    }
    if (new_width == img.width() && new_height == img.height()) return img;

    struct Tap {
        int lo;
        int hi;
        double frac;
    };
    auto taps = [](int src, int dst) {
        std::vector<Tap> out(static_cast<std::size_t>(dst));
        const double scale = static_cast<double>(src) / dst;
        for (int i = 0; i < dst; ++i) {
            const double pos = std::clamp((i + 0.5) * scale - 0.5, 0.0, src - 1.0);
            const int lo = static_cast<int>(std::floor(pos));
            out[static_cast<std::size_t>(i)] = {lo, std::min(lo + 1, src - 1), pos - lo};
        }
        return out;
    };
    const auto xs = taps(img.width(), new_width);
    const auto ys = taps(img.height(), new_height);

    GrayImage out(new_width, new_height);
    for (int y = 0; y < new_height; ++y) {
        const Tap& ty = ys[static_cast<std::size_t>(y)];
        for (int x = 0; x < new_width; ++x) {
            const Tap& tx = xs[static_cast<std::size_t>(x)];
            const double top = (1.0 - tx.frac) * img.at(tx.lo, ty.lo) + tx.frac * img.at(tx.hi, ty.lo);
            const double bottom =
                (1.0 - tx.frac) * img.at(tx.lo, ty.hi) + tx.frac * img.at(tx.hi, ty.hi);
            out.at(x, y) = quantize((1.0 - ty.frac) * top + ty.frac * bottom);
        }
    }
    return out;
}

ModelInput normalize_for_model(const GrayImage& crop) {
    const double scale = static_cast<double>(kModelInputHeight) / crop.height();
    const int scaled_width = std::max(1, static_cast<int>(std::lround(crop.width() * scale)));
    const GrayImage scaled = resize_bilinear(crop, scaled_width, kModelInputHeight);
    const float pad = static_cast<float>(median_intensity(crop)) / 255.0F;

    ModelInput input;
    input.values.assign(static_cast<std::size_t>(kModelInputWidth) * kModelInputHeight, pad);
    const int offset = scaled_width > kModelInputWidth ? (scaled_width - kModelInputWidth) / 2 : 0;
    const int copy_width = std::min(scaled_width, kModelInputWidth);
    for (int y = 0; y < kModelInputHeight; ++y) {
        for (int x = 0; x < copy_width; ++x) {
            input.values[static_cast<std::size_t>(y) * kModelInputWidth + x] =
                static_cast<float>(scaled.at(x + offset, y)) / 255.0F;
        }
    }
    return input;
}

std::uint8_t median_intensity(const GrayImage& img) {
    std::array<std::size_t, 256> histogram{};
    for (auto v : img.pixels()) ++histogram[v];
    // lower median
    const std::size_t target = (img.size() - 1) / 2;
    std::size_t seen = 0;
    for (int v = 0; v < 256; ++v) {
        seen += histogram[static_cast<std::size_t>(v)];
        if (seen > target) return static_cast<std::uint8_t>(v);
    }
    return 255;
}

double laplacian_variance(const GrayImage& img) {
    if (img.width() < 3 || img.height() < 3) return 0.0;
    double sum = 0.0;
    double sum_sq = 0.0;
    std::size_t count = 0;
    for (int y = 1; y + 1 < img.height(); ++y) {
        for (int x = 1; x + 1 < img.width(); ++x) {
            const double lap = 4.0 * img.at(x, y) - img.at(x - 1, y) - img.at(x + 1, y) -
                               img.at(x, y - 1) - img.at(x, y + 1);
            sum += lap;
            sum_sq += lap * lap;
            ++count;
        }
    }
    const double mean = sum / static_cast<double>(count);
    return sum_sq / static_cast<double>(count) - mean * mean;
}

}  // namespace docqa
