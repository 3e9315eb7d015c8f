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

namespace docqa {

CoverageCanvas::CoverageCanvas(int width, int height)
    : width_(width), height_(height),
      accum_(static_cast<std::size_t>(width) * height + width + 4, 0.0F) {
    if (width < 1 || height < 1) throw ParameterError("canvas dimensions must be positive");
}

// Signed-area accumulation: each edge deposits the area it sweeps in every
// scanline it crosses; a running sum over the buffer then yields coverage.
// x is clamped to [0, width], which preserves coverage inside the canvas.
void CoverageCanvas::add_line(double x0, double y0, double x1, double y1) {
    if (std::abs(y0 - y1) <= 1e-12) return;
    x0 = std::clamp(x0, 0.0, static_cast<double>(width_));
    x1 = std::clamp(x1, 0.0, static_cast<double>(width_));
    double dir = 1.0;
    if (y0 > y1) {
        std::swap(x0, x1);
        std::swap(y0, y1);
        dir = -1.0;
    }
    const double dxdy = (x1 - x0) / (y1 - y0);
    double x = x0;
    if (y0 < 0.0) x -= y0 * dxdy;
    const int row_begin = std::max(0, static_cast<int>(std::floor(y0)));
    const int row_end = std::min(height_, static_cast<int>(std::ceil(y1)));
    for (int y = row_begin; y < row_end; ++y) {
        float* line = accum_.data() + static_cast<std::size_t>(y) * width_;
        const double dy = std::min(y + 1.0, y1) - std::max(static_cast<double>(y), y0);
        const double xnext = x + dxdy * dy;
        const double d = dy * dir;
        const double xa = std::min(x, xnext);
        const double xb = std::max(x, xnext);
        const double xa_floor = std::floor(xa);
        const int xa_i = static_cast<int>(xa_floor);
        const double xb_ceil = std::ceil(xb);
        const int xb_i = static_cast<int>(xb_ceil);
        if (xb_i <= xa_i + 1) {
            const double xmf = 0.5 * (x + xnext) - xa_floor;
            line[xa_i] += static_cast<float>(d - d * xmf);
            line[xa_i + 1] += static_cast<float>(d * xmf);
        } else {
            const double s = 1.0 / (xb - xa);
            const double xa_f = xa - xa_floor;
            const double a0 = 0.5 * s * (1.0 - xa_f) * (1.0 - xa_f);
            const double xb_f = xb - xb_ceil + 1.0;
            const double am = 0.5 * s * xb_f * xb_f;
            line[xa_i] += static_cast<float>(d * a0);
            if (xb_i == xa_i + 2) {
                line[xa_i + 1] += static_cast<float>(d * (1.0 - a0 - am));
            } else {
                const double a1 = s * (1.5 - xa_f);
                line[xa_i + 1] += static_cast<float>(d * (a1 - a0));
                for (int xi = xa_i + 2; xi < xb_i - 1; ++xi) line[xi] += static_cast<float>(d * s);
                const double a2 = a1 + (xb_i - xa_i - 3) * s;
                line[xb_i - 1] += static_cast<float>(d * (1.0 - a2 - am));
            }
            line[xb_i] += static_cast<float>(d * am);
        }
        x = xnext;
    }
}

void CoverageCanvas::fill(const GlyphOutline& outline, double scale, double origin_x,
                          double baseline_y) {
    auto px = [&](const OutlinePoint& p) { return origin_x + p.x * scale; };
    auto py = [&](const OutlinePoint& p) { return baseline_y - p.y * scale; };
    for (const auto& contour : outline.contours) {
        const std::size_t n = contour.size();
        if (n < 2) continue;
        std::size_t i = 0;
        while (i < n) {
            const auto& p0 = contour[i];
            const auto& p1 = contour[(i + 1) % n];
            if (p1.on_curve) {
                add_line(px(p0), py(p0), px(p1), py(p1));
                ++i;
                continue;
            }
            const auto& p2 = contour[(i + 2) % n];
            const double x0 = px(p0), y0 = py(p0);
            const double cx = px(p1), cy = py(p1);
            const double x2 = px(p2), y2 = py(p2);
            const double ddx = x0 - 2 * cx + x2;
            const double ddy = y0 - 2 * cy + y2;
            const double dev_sq = ddx * ddx + ddy * ddy;
            const int pieces =
                dev_sq < 0.333 ? 1 : 1 + static_cast<int>(std::floor(std::sqrt(std::sqrt(3.0 * dev_sq))));
            double prev_x = x0;
            double prev_y = y0;
            for (int k = 1; k <= pieces; ++k) {
                const double t = static_cast<double>(k) / pieces;
                const double u = 1.0 - t;
                const double qx = u * u * x0 + 2 * u * t * cx + t * t * x2;
                const double qy = u * u * y0 + 2 * u * t * cy + t * t * y2;
                add_line(prev_x, prev_y, qx, qy);
                prev_x = qx;
                prev_y = qy;
            }
            i += 2;
        }
    }
}

std::vector<float> CoverageCanvas::coverage() const {
    std::vector<float> out(static_cast<std::size_t>(width_) * height_);
    double acc = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        acc += accum_[i];
        out[i] = static_cast<float>(std::min(1.0, std::abs(acc)));
    }
    return out;
}

std::u32string utf8_decode(std::string_view text) {
    std::u32string out;
    std::size_t i = 0;
    while (i < text.size()) {
        const auto c = static_cast<unsigned char>(text[i]);
        int extra;
        char32_t cp;
        if (c < 0x80) {
            cp = c;
            extra = 0;
        } else if ((c & 0xE0) == 0xC0) {
            cp = c & 0x1F;
            extra = 1;
        } else if ((c & 0xF0) == 0xE0) {
            cp = c & 0x0F;
            extra = 2;
        } else if ((c & 0xF8) == 0xF0) {
            cp = c & 0x07;
            extra = 3;
        } else {
            throw DataError("invalid UTF-8 lead byte");
        }
        if (i + static_cast<std::size_t>(extra) >= text.size()) {
            throw DataError("truncated UTF-8 sequence");
        }
        for (int k = 1; k <= extra; ++k) {
            const auto cc = static_cast<unsigned char>(text[i + k]);
            if ((cc & 0xC0) != 0x80) throw DataError("invalid UTF-8 continuation byte");
            cp = (cp << 6) | (cc & 0x3F);
        }
        out.push_back(cp);
        i += static_cast<std::size_t>(extra) + 1;
    }
    return out;
}

std::string utf8_encode(std::u32string_view text) {
    std::string out;
    for (char32_t cp : text) {
        if (cp < 0x80) {
            out.push_back(static_cast<char>(cp));
        } else if (cp < 0x800) {
            out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else if (cp < 0x10000) {
            out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else {
            out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        }
    }
    return out;
}

}  // namespace docqa
