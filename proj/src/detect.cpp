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

#include "docqa/detect.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "docqa/error.hpp"

namespace docqa {

namespace {

struct Component {
    BoundingBox box;
    long long ink = 0;
};

// Joins components that share a text row (vertical overlap of at least half
// the smaller height) and sit within max(max_gap, 1.5 x taller height) of each
// other. This reattaches words, i-dots and accents to their line.
std::vector<Component> group_rows(std::vector<Component> parts, int max_gap) {
    bool merged = true;
    while (merged) {
        merged = false;
        for (std::size_t i = 0; i < parts.size() && !merged; ++i) {
            for (std::size_t j = i + 1; j < parts.size(); ++j) {
                const BoundingBox& a = parts[i].box;
                const BoundingBox& b = parts[j].box;
                const int overlap = std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y);
                const int gap = std::max(a.x, b.x) - std::min(a.right(), b.right());
                const int reach = std::max(2 * max_gap, 3 * std::max(a.h, b.h));
                if (2 * overlap < std::min(a.h, b.h) || 2 * gap > reach) continue;
                const int x0 = std::min(a.x, b.x);
                const int y0 = std::min(a.y, b.y);
                parts[i].box = {x0, y0, std::max(a.right(), b.right()) - x0,
                                std::max(a.bottom(), b.bottom()) - y0};
                parts[i].ink += parts[j].ink;
                parts.erase(parts.begin() + static_cast<std::ptrdiff_t>(j));
                merged = true;
                break;
            }
        }
    }
    return parts;
}

}  // namespace

void DetectorParams::validate() const {
    if (smear_gap_px < 0 || min_height_px < 1 || max_height_px < 1 || min_width_px < 1 ||
        min_fill_ratio < 0.0 || min_fill_ratio > 1.0 || min_contrast < 0) {
        throw ParameterError("detector thresholds must be positive");
    }
    if (min_height_px >= max_height_px) {
        throw ParameterError("detector min height must be below max height");
    }
    if (binarization == Binarization::AdaptiveMean && (adaptive_window < 3 || adaptive_window % 2 == 0)) {
        throw ParameterError("adaptive window must be odd and >= 3");
    }
}

int otsu_threshold(const GrayImage& img) {
    std::array<double, 256> hist{};
    for (auto v : img.pixels()) hist[v] += 1.0;
    const double total = static_cast<double>(img.size());
    double sum_all = 0.0;
    for (int i = 0; i < 256; ++i) sum_all += i * hist[static_cast<std::size_t>(i)];

    double weight_lo = 0.0;
    double sum_lo = 0.0;
    double best = -1.0;
    int threshold = -1;
    for (int t = 0; t < 255; ++t) {
        weight_lo += hist[static_cast<std::size_t>(t)];
        sum_lo += t * hist[static_cast<std::size_t>(t)];
        const double weight_hi = total - weight_lo;
        if (weight_lo == 0.0 || weight_hi == 0.0) continue;
        const double mean_lo = sum_lo / weight_lo;
        const double mean_hi = (sum_all - sum_lo) / weight_hi;
        const double between = weight_lo * weight_hi * (mean_lo - mean_hi) * (mean_lo - mean_hi);
        if (between > best) {
            best = between;
            threshold = t;
        }
    }
    return threshold;
}

std::vector<std::uint8_t> binarize(const GrayImage& img, const DetectorParams& params) {
    std::vector<std::uint8_t> mask(img.size(), 0);
    const auto [lo, hi] = std::minmax_element(img.pixels().begin(), img.pixels().end());
    if (*hi - *lo < params.min_contrast) return mask;

    if (params.binarization == Binarization::OtsuGlobal) {
        const int t = otsu_threshold(img);
        if (t < 0) return mask;
        std::transform(img.pixels().begin(), img.pixels().end(), mask.begin(),
                       [t](std::uint8_t v) { return static_cast<std::uint8_t>(v <= t); });
        return mask;
    }

    // mean over a clamped window via an integral image
    const int w = img.width();
    const int h = img.height();
    std::vector<long long> integral(static_cast<std::size_t>(w + 1) * (h + 1), 0);
    for (int y = 0; y < h; ++y) {
        long long row = 0;
        for (int x = 0; x < w; ++x) {
            row += img.at(x, y);
            integral[static_cast<std::size_t>(y + 1) * (w + 1) + x + 1] =
                integral[static_cast<std::size_t>(y) * (w + 1) + x + 1] + row;
        }
    }
    const int r = params.adaptive_window / 2;
    for (int y = 0; y < h; ++y) {
        const int y0 = std::max(0, y - r);
        const int y1 = std::min(h, y + r + 1);
        for (int x = 0; x < w; ++x) {
            const int x0 = std::max(0, x - r);
            const int x1 = std::min(w, x + r + 1);
            const auto at = [&](int xx, int yy) {
                return integral[static_cast<std::size_t>(yy) * (w + 1) + xx];
            };
            const long long sum = at(x1, y1) - at(x0, y1) - at(x1, y0) + at(x0, y0);
            const double mean = static_cast<double>(sum) / ((x1 - x0) * (y1 - y0));
            mask[static_cast<std::size_t>(y) * w + x] = img.at(x, y) < mean - params.adaptive_offset;
        }
    }
    return mask;
}

void smear_rows(std::vector<std::uint8_t>& mask, int width, int height, int max_gap) {
    for (int y = 0; y < height; ++y) {
        std::uint8_t* row = mask.data() + static_cast<std::size_t>(y) * width;
        int last_ink = -1;
        for (int x = 0; x < width; ++x) {
            if (!row[x]) continue;
            if (last_ink >= 0 && x - last_ink - 1 <= max_gap) {
                std::fill(row + last_ink + 1, row + x, std::uint8_t{1});
            }
            last_ink = x;
        }
    }
}

std::vector<DetectedLine> detect(const GrayImage& img, const DetectorParams& params) {
    params.validate();
    const int w = img.width();
    const int h = img.height();
    const auto ink = binarize(img, params);
    auto smeared = ink;
    smear_rows(smeared, w, h, params.smear_gap_px);

    // 8-connected labelling by explicit-stack flood fill
    std::vector<int> label(smeared.size(), -1);
    std::vector<Component> components;
    std::vector<int> stack;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const auto start = static_cast<std::size_t>(y) * w + x;
            if (!smeared[start] || label[start] >= 0) continue;
            const int id = static_cast<int>(components.size());
            int x0 = x, y0 = y, x1 = x, y1 = y;
            long long ink_count = 0;
            label[start] = id;
            stack.assign(1, static_cast<int>(start));
            while (!stack.empty()) {
                const int p = stack.back();
                stack.pop_back();
                const int px = p % w;
                const int py = p / w;
                x0 = std::min(x0, px);
                x1 = std::max(x1, px);
                y0 = std::min(y0, py);
                y1 = std::max(y1, py);
                ink_count += ink[static_cast<std::size_t>(p)];
                for (int dy = -1; dy <= 1; ++dy) {
                    const int ny = py + dy;
                    if (ny < 0 || ny >= h) continue;
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int nx = px + dx;
                        if (nx < 0 || nx >= w) continue;
                        const auto q = static_cast<std::size_t>(ny) * w + nx;
                        if (smeared[q] && label[q] < 0) {
                            label[q] = id;
                            stack.push_back(static_cast<int>(q));
                        }
                    }
                }
            }
            components.push_back({{x0, y0, x1 - x0 + 1, y1 - y0 + 1}, ink_count});
        }
    }

    components = group_rows(std::move(components), 2 * params.smear_gap_px);

    std::vector<DetectedLine> lines;
    for (const auto& c : components) {
        const BoundingBox& b = c.box;
        if (b.h < params.min_height_px || b.h > params.max_height_px || b.w < params.min_width_px) {
            continue;
        }
        if (static_cast<double>(c.ink) < params.min_fill_ratio * static_cast<double>(b.area())) {
            continue;
        }
        lines.push_back({b, img.crop(b.x, b.y, b.w, b.h), std::nullopt});
    }
    std::sort(lines.begin(), lines.end(), [](const DetectedLine& a, const DetectedLine& b) {
        return a.box.y != b.box.y ? a.box.y < b.box.y : a.box.x < b.box.x;
    });
    return lines;
}

std::vector<DetectedLine> detect_with_dividing(const GrayImage& img, const GridSpec& grid,
                                               const DetectorParams& params) {
    params.validate();
    const auto segments = divide(img, grid);
    const bool single = segments.size() == 1;
    std::vector<DetectedLine> lines;
    for (std::size_t i = 0; i < segments.size(); ++i) {
        const Segment& seg = segments[i];
        for (auto& line : detect(seg.image, params)) {
            line.box.x += seg.x;
            line.box.y += seg.y;
            if (!single) line.source_segment = static_cast<int>(i);
            lines.push_back(std::move(line));
        }
    }
    return lines;
}

std::vector<DetectedLine> detect_resized(const GrayImage& img, int target_width,
                                         int target_height, const DetectorParams& params) {
    if (target_width < 1 || target_height < 1) throw ParameterError("resize target must be positive");
    if (target_width == img.width() && target_height == img.height()) return detect(img, params);
    const GrayImage small = resize_bilinear(img, target_width, target_height);
    const double sx = static_cast<double>(img.width()) / target_width;
    const double sy = static_cast<double>(img.height()) / target_height;
    std::vector<DetectedLine> lines;
    for (const auto& found : detect(small, params)) {
        const int x0 = std::clamp(static_cast<int>(std::floor(found.box.x * sx)), 0, img.width() - 1);
        const int y0 = std::clamp(static_cast<int>(std::floor(found.box.y * sy)), 0, img.height() - 1);
        const int x1 = std::clamp(static_cast<int>(std::ceil(found.box.right() * sx)), x0 + 1, img.width());
        const int y1 = std::clamp(static_cast<int>(std::ceil(found.box.bottom() * sy)), y0 + 1, img.height());
        const BoundingBox box{x0, y0, x1 - x0, y1 - y0};
        lines.push_back({box, img.crop(box.x, box.y, box.w, box.h), std::nullopt});
    }
    return lines;
}

std::string DetectionMode::describe() const {
    switch (kind) {
        case Kind::Divided:
            return "divided " + std::to_string(grid.nx) + "x" + std::to_string(grid.ny);
        case Kind::Resized:
            return "resized " + std::to_string(target_width) + "x" + std::to_string(target_height);
        case Kind::Native:
            break;
    }
    return "native";
}

Detector make_baseline_detector(const DetectorParams& params, const DetectionMode& mode) {
    params.validate();
    switch (mode.kind) {
        case DetectionMode::Kind::Divided:
            mode.grid.validate();
            return [params, grid = mode.grid](const GrayImage& img) {
                return detect_with_dividing(img, grid, params);
            };
        case DetectionMode::Kind::Resized:
            if (mode.target_width < 1 || mode.target_height < 1) {
                throw ParameterError("resize target must be positive");
            }
            return [params, w = mode.target_width, h = mode.target_height](const GrayImage& img) {
                return detect_resized(img, w, h, params);
            };
        case DetectionMode::Kind::Native:
            break;
    }
    return [params](const GrayImage& img) { return detect(img, params); };
}

}  // namespace docqa
