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
#include "docqa/predict.hpp"

namespace docqa {

namespace {

constexpr double kReferenceSigma = 8.0;
// Gradient energy of a blurred line of width s falls off as s^-kEnergyExponent;
// fitted on rendered lines (mixed strokes and edges sit between 1 and 3).
constexpr double kEnergyExponent = 2.3;
// Blur already present before synthetic degradation (glyph anti-aliasing,
// rotation interpolation, pixel sampling), in pixels.
constexpr double kIntrinsicSigma = 0.42;

double gradient_energy(const RealImage& img) {
    double energy = 0.0;
    for (int y = 0; y + 1 < img.height; ++y) {
        for (int x = 0; x + 1 < img.width; ++x) {
            const double gx = img.at(x + 1, y) - img.at(x, y);
            const double gy = img.at(x, y + 1) - img.at(x, y);
            energy += gx * gx + gy * gy;
        }
    }
    return energy;
}

// Standard deviation of the renormalised truncated Gaussian kernel.
double truncated_std(double sigma, int kernel_size) {
    const auto taps = gaussian_kernel(sigma, kernel_size);
    const int radius = kernel_size / 2;
    double var = 0.0;
    for (int i = -radius; i <= radius; ++i) var += taps[static_cast<std::size_t>(i + radius)] * i * i;
    return std::sqrt(var);
}

}  // namespace

double estimate_blur_sigma(const GrayImage& crop, int kernel_size) {
    const auto [lo, hi] = std::minmax_element(crop.pixels().begin(), crop.pixels().end());
    if (*hi - *lo < 5 || crop.width() < 2 || crop.height() < 2) {
        throw NoSignalError("crop has no usable contrast");
    }
    const RealImage img(crop);
    const double e0 = gradient_energy(img);
    const int ref_size = 2 * static_cast<int>(std::ceil(4.0 * kReferenceSigma)) + 1;
    const double e1 = gradient_energy(gaussian_blur_real(img, {kReferenceSigma, ref_size}));
    if (!(e0 > 0.0)) throw NoSignalError("crop has no gradient energy");

    const double ratio = std::clamp(e1 / e0, 1e-9, 1.0 - 1e-9);
    const double q = std::pow(ratio, 2.0 / kEnergyExponent);
    const double measured_var = kReferenceSigma * kReferenceSigma * q / (1.0 - q);
    const double blur_std = std::sqrt(std::max(0.0, measured_var - kIntrinsicSigma * kIntrinsicSigma));

    // invert the (monotone) truncated-kernel std by bisection
    double a = 0.05;
    double b = 50.0;
    if (blur_std <= truncated_std(a, kernel_size)) return a;
    if (blur_std >= truncated_std(b, kernel_size)) return b;
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (a + b);
        (truncated_std(mid, kernel_size) < blur_std ? a : b) = mid;
    }
    return 0.5 * (a + b);
}

QualityScore analytic_predict(const GrayImage& crop, const LabelFnConfig& cfg) {
    const double sigma = std::clamp(estimate_blur_sigma(crop), kLabelKnots.front(), kLabelKnots.back());
    const double q = quality_label(sigma, cfg);
    return {q, q};
}

}  // namespace docqa
