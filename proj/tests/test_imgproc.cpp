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

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <numeric>

#include "docqa/error.hpp"
#include "docqa/imgproc.hpp"
#include "test_support.hpp"

namespace docqa {
namespace {

// Direct 2-D convolution with the outer product of the 1-D kernel and edge
// replication; the reference the separable implementation must reproduce.
RealImage dense_blur(const GrayImage& img, double sigma, int size) {
    const auto k = gaussian_kernel(sigma, size);
    const int r = size / 2;
    RealImage out(img.width(), img.height());
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            double acc = 0.0;
            for (int j = -r; j <= r; ++j) {
                for (int i = -r; i <= r; ++i) {
                    acc += k[static_cast<std::size_t>(i + r)] * k[static_cast<std::size_t>(j + r)] *
                           img.clamped(x + i, y + j);
                }
            }
            out.at(x, y) = acc;
        }
    }
    return out;
}

int rounded(double v) { return static_cast<int>(std::clamp(std::lround(v), 0L, 255L)); }

TEST(GaussianKernel, NormalisedAndSymmetric) {
    for (double sigma : {0.3, 1.0, 2.5, 4.5, 20.0}) {
        const auto k = gaussian_kernel(sigma, 11);
        ASSERT_EQ(k.size(), 11u);
        EXPECT_NEAR(std::accumulate(k.begin(), k.end(), 0.0), 1.0, 1e-12);
        for (std::size_t i = 0; i < 5; ++i) EXPECT_DOUBLE_EQ(k[i], k[10 - i]);
        for (std::size_t i = 0; i < 5; ++i) EXPECT_LE(k[i], k[i + 1]);
    }
}

TEST(GaussianKernel, RejectsBadSpecs) {
    EXPECT_THROW(gaussian_kernel(1.0, 10), ParameterError);
    EXPECT_THROW(gaussian_kernel(1.0, 0), ParameterError);
    EXPECT_THROW(gaussian_kernel(0.0, 11), ParameterError);
    EXPECT_THROW(gaussian_blur(GrayImage(5, 5), {1.0, 4}), ParameterError);
}

TEST(GaussianBlur, ImpulseMatchesDenseConvolution) {
    GrayImage img(21, 21, 0);
    img.at(10, 10) = 255;
    const auto out = gaussian_blur(img, {1.0, 11});
    const auto ref = dense_blur(img, 1.0, 11);
    double mass = 0.0;
    for (int y = 0; y < 21; ++y) {
        for (int x = 0; x < 21; ++x) {
            EXPECT_EQ(out.at(x, y), rounded(ref.at(x, y))) << x << "," << y;
            mass += ref.at(x, y);
        }
    }
    EXPECT_NEAR(mass, 255.0, 1e-9);
    const auto real = gaussian_blur_real(RealImage(img), {1.0, 11});
    EXPECT_NEAR(std::accumulate(real.values.begin(), real.values.end(), 0.0), 255.0, 1e-9);
}

TEST(GaussianBlur, RandomImagesMatchDenseConvolution) {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const auto img = testing::random_image(23, 17, seed);
        const double sigma = 0.5 + static_cast<double>(seed);
        const auto out = gaussian_blur(img, {sigma, 11});
        const auto ref = dense_blur(img, sigma, 11);
        const auto real = gaussian_blur_real(RealImage(img), {sigma, 11});
        for (int y = 0; y < img.height(); ++y) {
            for (int x = 0; x < img.width(); ++x) {
                EXPECT_NEAR(real.at(x, y), ref.at(x, y), 1e-9);
                // separable and dense sums differ only by rounding at .5 ties
                EXPECT_LE(std::abs(out.at(x, y) - rounded(ref.at(x, y))), 1);
            }
        }
    }
}

TEST(GaussianBlur, TinySigmaIsNearIdentity) {
    const auto img = testing::random_image(40, 30, 9);
    const auto out = gaussian_blur(img, {0.01, 11});
    for (std::size_t i = 0; i < img.size(); ++i) {
        EXPECT_LE(std::abs(static_cast<int>(out.pixels()[i]) - img.pixels()[i]), 1);
    }
}

TEST(GaussianBlur, PreservesMeanIntensity) {
    Rng rng(31);
    for (int t = 0; t < 50; ++t) {
        const int w = static_cast<int>(rng.uniform_int(5, 60));
        const int h = static_cast<int>(rng.uniform_int(5, 60));
        // a constant 5-pixel frame keeps the kernel support inside the image
        const auto inner = testing::random_image(w, h, rng.next());
        GrayImage img(w + 10, h + 10, 128);
        img.paste(inner, 5, 5);
        const double sigma = rng.uniform(0.5, 4.5);
        EXPECT_LT(std::abs(gaussian_blur(img, {sigma, 11}).mean() - img.mean()), 0.5);
    }
}

TEST(GaussianBlur, SharpnessFallsWithSigma) {
    const auto& synth = testing::synthesizer();
    for (std::uint64_t seed = 100; seed < 110; ++seed) {
        auto spec = synth.sample_spec(seed);
        double previous = std::numeric_limits<double>::infinity();
        for (double sigma : {0.5, 1.5, 2.5, 3.5}) {
            spec.sigma = sigma;
            const double v = laplacian_variance(synth.render(spec).image);
            EXPECT_LT(v, previous) << "seed " << seed << " sigma " << sigma;
            previous = v;
        }
    }
}

TEST(Rotate, ZeroAngleIsIdentity) {
    const auto img = testing::random_image(50, 20, 3);
    EXPECT_EQ(rotate(img, 0.0, 0), img);
}

TEST(Rotate, UniformImageStaysUniform) {
    const GrayImage white(400, 40, 255);
    EXPECT_EQ(rotate(white, 2.0, 255), white);
}

TEST(Rotate, RejectsSteepAngles) {
    EXPECT_THROW(rotate(GrayImage(10, 10), 46.0, 0), ParameterError);
    EXPECT_THROW(rotate(GrayImage(10, 10), std::nan(""), 0), ParameterError);
}

TEST(Rotate, PositiveAngleTurnsCounterClockwise) {
    GrayImage img(41, 41, 255);
    img.at(35, 20) = 0;
    const auto out = rotate(img, 10.0, 255);
    int best_x = 0, best_y = 0, best = 256;
    for (int y = 0; y < 41; ++y) {
        for (int x = 0; x < 41; ++x) {
            if (out.at(x, y) < best) best = out.at(x, y), best_x = x, best_y = y;
        }
    }
    // counter-clockwise on screen: the pixel moves up
    EXPECT_LT(best_y, 20);
    EXPECT_GE(best_x, 34);
}

TEST(Rotate, RoundTripOnSmoothContent) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto img = gaussian_blur(testing::random_image(200, 60, seed), {6.0, 37});
        for (double angle : {-2.0, -0.7, 1.3, 2.0}) {
            const auto back = rotate(rotate(img, angle, 128), -angle, 128);
            int good = 0, total = 0;
            // corners rotate out of frame; compare the region that stays inside
            for (int y = 8; y < img.height() - 8; ++y) {
                for (int x = 8; x < img.width() - 8; ++x) {
                    ++total;
                    good += std::abs(img.at(x, y) - back.at(x, y)) <= 2;
                }
            }
            EXPECT_GE(good, 0.99 * total) << "seed " << seed << " angle " << angle;
        }
    }
}

TEST(Divide, SegmentsTileTheImage) {
    const auto img = testing::random_image(103, 61, 5);
    const auto segs = divide(img, {4, 6});
    ASSERT_EQ(segs.size(), 24u);
    std::vector<int> covered(img.size(), 0);
    for (const auto& s : segs) {
        for (int y = 0; y < s.image.height(); ++y) {
            for (int x = 0; x < s.image.width(); ++x) {
                EXPECT_EQ(s.image.at(x, y), img.at(s.x + x, s.y + y));
                ++covered[static_cast<std::size_t>(s.y + y) * img.width() + s.x + x];
            }
        }
    }
    for (int c : covered) EXPECT_EQ(c, 1);
    EXPECT_EQ(segs[5].column, 1);
    EXPECT_EQ(segs[5].row, 1);
}

TEST(Divide, FloorBoundaries) {
    EXPECT_EQ(segment_start(10, 3, 0), 0);
    EXPECT_EQ(segment_start(10, 3, 1), 3);
    EXPECT_EQ(segment_start(10, 3, 2), 6);
    EXPECT_EQ(segment_start(10, 3, 3), 10);
}

TEST(Divide, RejectsOversizedGrid) {
    EXPECT_THROW(divide(GrayImage(3, 10), {4, 6}), ParameterError);
    EXPECT_THROW(divide(GrayImage(30, 10), {0, 6}), ParameterError);
    EXPECT_EQ(divide(GrayImage(30, 10), {1, 1}).front().image, GrayImage(30, 10));
}

TEST(Resize, ConstantStaysConstantAndIdentityIsExact) {
    const GrayImage flat(37, 23, 77);
    EXPECT_EQ(resize_bilinear(flat, 11, 50), GrayImage(11, 50, 77));
    const auto img = testing::random_image(31, 17, 8);
    EXPECT_EQ(resize_bilinear(img, 31, 17), img);
    EXPECT_THROW(resize_bilinear(img, 0, 3), ParameterError);
}

TEST(Resize, HalvingAveragesPixelPairs) {
    GrayImage img(8, 2);
    for (int x = 0; x < 8; ++x) img.at(x, 0) = img.at(x, 1) = static_cast<std::uint8_t>(x % 2 ? 200 : 100);
    const auto half = resize_bilinear(img, 4, 1);
    for (int x = 0; x < 4; ++x) EXPECT_EQ(half.at(x, 0), 150);
}

TEST(NormalizeForModel, ExactShapeIsScaledOnly) {
    const auto img = testing::random_image(400, 40, 12);
    const auto in = normalize_for_model(img);
    ASSERT_EQ(in.values.size(), 16000u);
    for (std::size_t i = 0; i < img.size(); ++i) {
        EXPECT_FLOAT_EQ(in.values[i], static_cast<float>(img.pixels()[i]) / 255.0F);
    }
}

TEST(NormalizeForModel, DoubleSizeIsDownscaled) {
    const auto img = gaussian_blur(testing::random_image(800, 80, 13), {2.0, 11});
    const auto in = normalize_for_model(img);
    const auto ref = resize_bilinear(img, 400, 40);
    for (std::size_t i = 0; i < ref.size(); ++i) {
        EXPECT_FLOAT_EQ(in.values[i], static_cast<float>(ref.pixels()[i]) / 255.0F);
    }
}

TEST(NormalizeForModel, NarrowCropIsPaddedWithMedian) {
    const auto in = normalize_for_model(GrayImage(100, 40, 100));
    for (float v : in.values) EXPECT_FLOAT_EQ(v, 100.0F / 255.0F);

    GrayImage mixed(100, 40, 220);
    for (int x = 0; x < 10; ++x) mixed.at(x, 5) = 0;
    const auto padded = normalize_for_model(mixed);
    EXPECT_FLOAT_EQ(padded.values[5 * 400 + 3], 0.0F);
    EXPECT_FLOAT_EQ(padded.values[5 * 400 + 300], 220.0F / 255.0F);
}

TEST(NormalizeForModel, WideCropIsCentreCropped) {
    GrayImage wide(800, 40, 200);
    for (int y = 0; y < 40; ++y) wide.at(400, y) = 0;
    const auto in = normalize_for_model(wide);
    EXPECT_FLOAT_EQ(in.values[10 * 400 + 200], 0.0F);
    EXPECT_FLOAT_EQ(in.values[10 * 400 + 0], 200.0F / 255.0F);
}

TEST(MedianIntensity, LowerMedian) {
    EXPECT_EQ(median_intensity(GrayImage(1, 4, std::vector<std::uint8_t>{9, 1, 5, 7})), 5);
    EXPECT_EQ(median_intensity(GrayImage(3, 1, std::vector<std::uint8_t>{9, 1, 5})), 5);
}

TEST(Pgm, RoundTripIsBitExact) {
    const auto img = testing::random_image(57, 33, 21);
    EXPECT_EQ(decode_pgm(encode_pgm(img)), img);
    const auto path = std::filesystem::temp_directory_path() / "docqa_roundtrip.pgm";
    write_pgm(img, path);
    EXPECT_EQ(read_pgm(path), img);
    std::filesystem::remove(path);
}

TEST(Pgm, RejectsMalformedInput) {
    const std::string text = "P2\n2 2\n255\n0 0 0 0\n";
    EXPECT_THROW(decode_pgm(std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size())),
                 DataError);
    auto bytes = encode_pgm(GrayImage(4, 4, 1));
    bytes.pop_back();
    EXPECT_THROW(decode_pgm(bytes), DataError);
    EXPECT_THROW(read_pgm("/nonexistent/file.pgm"), DataError);
}

}  // namespace
}  // namespace docqa
