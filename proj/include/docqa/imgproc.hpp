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

#include <cstdint>
#include <vector>

#include "docqa/gray_image.hpp"

namespace docqa {

// Gaussian blur parameters. The window is fixed at kernel_size taps and the
// truncated kernel is renormalised to unit mass.
struct BlurSpec {
    double sigma = 1.0;
    int kernel_size = 11;

    void validate() const;
};

// Number of equal pieces along each axis when dividing an image.
struct GridSpec {
    int nx = 4;
    int ny = 6;

    void validate() const;
    void validate_for(const GrayImage& img) const;
};

struct Segment {
    GrayImage image;
    int x = 0;  // top-left corner in the source image
    int y = 0;
    int column = 0;
    int row = 0;
};

// Real-valued image used for intermediate results.
struct RealImage {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    RealImage() = default;
    RealImage(int w, int h, double fill = 0.0);
    explicit RealImage(const GrayImage& img);

    double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
    double& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
};

inline constexpr int kModelInputWidth = 400;
inline constexpr int kModelInputHeight = 40;

// Network input: intensities in [0, 1], row-major kModelInputHeight x kModelInputWidth.
struct ModelInput {
    int width = kModelInputWidth;
    int height = kModelInputHeight;
    std::vector<float> values;
};

// Normalised 1-D Gaussian taps, centred, length `size` (odd).
std::vector<double> gaussian_kernel(double sigma, int size);

GrayImage gaussian_blur(const GrayImage& img, const BlurSpec& spec);

// Same separable convolution without quantisation.
RealImage gaussian_blur_real(const RealImage& img, const BlurSpec& spec);

// Rotation about the image centre, bilinear sampling; samples that fall
// outside the source take `fill`. Positive angles turn content counter-clockwise
// as displayed. |angle_deg| must not exceed 45.
GrayImage rotate(const GrayImage& img, double angle_deg, std::uint8_t fill);
// Fill defaults to the median intensity.
GrayImage rotate(const GrayImage& img, double angle_deg);

// First index of piece `i` out of `n` along an axis of length `extent`.
int segment_start(int extent, int n, int i);

std::vector<Segment> divide(const GrayImage& img, const GridSpec& grid);

// Bilinear resampling with half-pixel aligned sample grids: destination pixel
// i maps to source coordinate (i + 0.5) * src / dst - 0.5, clamped to the
// source extent.
GrayImage resize_bilinear(const GrayImage& img, int new_width, int new_height);

// Scales the crop to the model height preserving aspect ratio, then
// right-pads (with the crop's median intensity) or centre-crops to the model
// width, and maps intensities to [0, 1].
ModelInput normalize_for_model(const GrayImage& crop);

std::uint8_t median_intensity(const GrayImage& img);

// Variance of the 4-neighbour Laplacian over interior pixels.
double laplacian_variance(const GrayImage& img);

}  // namespace docqa
