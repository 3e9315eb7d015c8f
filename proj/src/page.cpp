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

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "docqa/error.hpp"
#include "docqa/random.hpp"
#include "docqa/synth.hpp"

namespace docqa {

BoundingBox ink_extent(const GrayImage& img, int background, double fraction) {
    int max_dev = 0;
    for (auto v : img.pixels()) max_dev = std::max(max_dev, std::abs(v - background));
    if (max_dev == 0) return {0, 0, 0, 0};
    const double threshold = fraction * max_dev;
    int x0 = img.width(), y0 = img.height(), x1 = -1, y1 = -1;
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            if (std::abs(img.at(x, y) - background) >= threshold) {
                x0 = std::min(x0, x);
                y0 = std::min(y0, y);
                x1 = std::max(x1, x);
                y1 = std::max(y1, y);
            }
        }
    }
    return {x0, y0, x1 - x0 + 1, y1 - y0 + 1};
}

ComposedPage compose_page(const LineSynthesizer& synth, const PageConfig& cfg, double sigma,
                          std::uint64_t seed) {
    if (cfg.width < 1 || cfg.height < 0 || cfg.min_lines < 1 || cfg.max_lines < cfg.min_lines ||
        cfg.line_gap < 0 || cfg.margin < 0 || !(cfg.line_scale.lo > 0.0) ||
        cfg.line_scale.hi < cfg.line_scale.lo) {
        throw ParameterError("invalid page configuration");
    }
    Rng rng(seed);
    const int count = static_cast<int>(rng.uniform_int(cfg.min_lines, cfg.max_lines));
    const int usable_width = cfg.width - 2 * cfg.margin;
    if (usable_width < 1) throw ParameterError("page margins leave no room for text");

    std::vector<TextLineSample> rendered;
    for (int i = 0; i < count; ++i) {
        LineSpec spec = synth.sample_spec(derive_seed(seed, static_cast<std::uint64_t>(i) + 1));
        const double scale = rng.uniform(cfg.line_scale.lo, cfg.line_scale.hi);
        spec.width = std::min(usable_width,
                              std::max(1, static_cast<int>(std::lround(spec.width * scale))));
        spec.height = std::max(1, static_cast<int>(std::lround(spec.height * scale)));
        spec.x_offset *= scale;
        spec.y_jitter *= scale;
        spec.background = cfg.background;
        spec.sigma = sigma;
        rendered.push_back(synth.render(spec));
    }

    int height = cfg.height;
    if (height == 0) {
        height = 2 * cfg.margin + cfg.line_gap * (count - 1);
        for (const auto& s : rendered) height += s.image.height();
    }

    ComposedPage page;
    page.image = GrayImage(cfg.width, height, static_cast<std::uint8_t>(cfg.background));
    int y = cfg.margin;
    double weighted = 0.0;
    double total_area = 0.0;
    for (const auto& s : rendered) {
        if (y + s.image.height() > height - cfg.margin && !page.lines.empty()) break;
        const int slack = usable_width - s.image.width();
        const int x = cfg.margin + static_cast<int>(rng.uniform_int(0, std::max(0, slack)));
        page.image.paste(s.image, x, y);
        BoundingBox extent = ink_extent(s.image, cfg.background);
        if (extent.w > 0) {
            extent.x += x;
            extent.y += y;
            page.lines.push_back({{x, y, s.image.width(), s.image.height()}, extent, s.sigma(), s.label});
            weighted += static_cast<double>(extent.area()) * s.label;
            total_area += static_cast<double>(extent.area());
        }
        y += s.image.height() + cfg.line_gap;
    }
    page.ground_truth = total_area > 0 ? weighted / total_area : 1.0;
    return page;
}

}  // namespace docqa
