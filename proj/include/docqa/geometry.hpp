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

#pragma once

#include <algorithm>

namespace docqa {

// Axis-aligned pixel rectangle; (x, y) is the top-left corner.
struct BoundingBox {
    int x = 0;
    int y = 0;
    int w = 1;
    int h = 1;

    long long area() const noexcept { return static_cast<long long>(w) * h; }
    int right() const noexcept { return x + w; }
    int bottom() const noexcept { return y + h; }

    bool inside(int width, int height) const noexcept {
        return x >= 0 && y >= 0 && w >= 1 && h >= 1 && right() <= width && bottom() <= height;
    }

    friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

inline long long intersection_area(const BoundingBox& a, const BoundingBox& b) noexcept {
    const int w = std::min(a.right(), b.right()) - std::max(a.x, b.x);
    const int h = std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y);
    return w > 0 && h > 0 ? static_cast<long long>(w) * h : 0;
}

inline double iou(const BoundingBox& a, const BoundingBox& b) noexcept {
    const auto inter = intersection_area(a, b);
    const auto uni = a.area() + b.area() - inter;
    return uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

}  // namespace docqa
