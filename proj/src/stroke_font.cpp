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

#include "docqa/error.hpp"
#include "docqa/font.hpp"
#include "docqa/random.hpp"

namespace docqa {

namespace {

constexpr double kMargin = 0.08;
constexpr double kStrokeWidth = 0.075;

// Rectangle of width `w` around segment (x0,y0)-(x1,y1), counter-clockwise.
Contour stroke_quad(double x0, double y0, double x1, double y1, double w) {
    const double len = std::hypot(x1 - x0, y1 - y0);
    const double nx = -(y1 - y0) / len * 0.5 * w;
    const double ny = (x1 - x0) / len * 0.5 * w;
    Contour quad = {{x0 - nx, y0 - ny, true},
                    {x1 - nx, y1 - ny, true},
                    {x1 + nx, y1 + ny, true},
                    {x0 + nx, y0 + ny, true}};
    double area = 0.0;
    for (std::size_t i = 0; i < quad.size(); ++i) {
        const auto& p = quad[i];
        const auto& q = quad[(i + 1) % quad.size()];
        area += p.x * q.y - q.x * p.y;
    }
    if (area < 0.0) std::reverse(quad.begin(), quad.end());
    return quad;
}

}  // namespace

bool StrokeFont::has_glyph(char32_t cp) const {
    return (cp >= 0x4E00 && cp <= 0x9FFF) || (cp >= 0x3400 && cp <= 0x4DBF) || cp == U' ';
}

GlyphOutline StrokeFont::glyph(char32_t cp) const {
    if (!has_glyph(cp)) {
        throw ParameterError("builtin stroke font has no glyph for U+" +
                             std::to_string(static_cast<unsigned>(cp)));
    }
    GlyphOutline outline;
    outline.advance = 1.0;
    if (cp == U' ') return outline;

    Rng rng(mix_seed(static_cast<std::uint64_t>(cp)));
    const double lo = kMargin;
    const double hi = 1.0 - kMargin;
    const double bottom = -descent() + kMargin;
    const double top = ascent() - kMargin;
    // strokes snap to a 7x7 lattice, like the regular grid of printed ideographs
    auto lattice = [&](double a, double b) { return a + (b - a) * rng.uniform_int(0, 6) / 6.0; };

    const int strokes = static_cast<int>(rng.uniform_int(4, 11));
    for (int i = 0; i < strokes; ++i) {
        const auto kind = rng.uniform_int(0, 9);
        if (kind <= 3) {  // horizontal
            const double y = lattice(bottom, top);
            double x0 = lattice(lo, hi);
            double x1 = lattice(lo, hi);
            if (std::abs(x1 - x0) < 0.25) x1 = x0 < 0.5 ? hi : lo;
            outline.contours.push_back(stroke_quad(std::min(x0, x1), y, std::max(x0, x1), y,
                                                   kStrokeWidth));
        } else if (kind <= 6) {  // vertical
            const double x = lattice(lo, hi);
            double y0 = lattice(bottom, top);
            double y1 = lattice(bottom, top);
            if (std::abs(y1 - y0) < 0.25) y1 = y0 < 0.4 ? top : bottom;
            outline.contours.push_back(stroke_quad(x, std::min(y0, y1), x, std::max(y0, y1),
                                                   kStrokeWidth));
        } else if (kind <= 8) {  // falling / rising slant
            const double x0 = lattice(lo, 0.5);
            const double y0 = lattice(0.35, top);
            const double dx = rng.uniform(0.2, 0.45);
            const double dy = rng.uniform(0.2, 0.45);
            const double sign = kind == 7 ? -1.0 : 1.0;
            const double xa = sign < 0 ? x0 + dx : x0;
            const double xb = sign < 0 ? x0 : x0 + dx;
            outline.contours.push_back(
                stroke_quad(xa, y0, xb, std::max(bottom, y0 - dy), kStrokeWidth));
        } else {  // dot
            const double x = lattice(lo, hi);
            const double y = lattice(bottom + 0.1, top);
            outline.contours.push_back(stroke_quad(x, y, x + 0.07, y - 0.09, 1.3 * kStrokeWidth));
        }
    }
    return outline;
}

}  // namespace docqa
