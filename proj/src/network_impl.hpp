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

#include <Eigen/Dense>

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "docqa/error.hpp"
#include "docqa/predict.hpp"

namespace docqa::detail {

// Forward/backward evaluator for one architecture and parameter vector.
// Buffers are reused across samples; not thread-safe.
template <typename T>
class Evaluator {
public:
    using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;
    using ConstMap = Eigen::Map<const Mat>;
    using MutMap = Eigen::Map<Mat>;

    Evaluator(const ArchDescriptor& arch, std::span<const T> params)
        : arch_(arch), layout_(arch), blocks_(arch.blocks()), params_(params), states_(blocks_.size()) {
        if (params.size() != layout_.total) {
            throw ParameterError("parameter vector does not match architecture");
        }
        for (std::size_t l = 0; l < blocks_.size(); ++l) {
            const auto& b = blocks_[l];
            auto& s = states_[l];
            s.cols.resize(static_cast<Eigen::Index>(b.in_channels) * 9, static_cast<Eigen::Index>(b.height) * b.width);
            s.act.resize(b.out_channels, static_cast<Eigen::Index>(b.height) * b.width);
            s.pooled.resize(b.out_channels, static_cast<Eigen::Index>(b.pooled_height) * b.pooled_width);
            s.argmax.resize(static_cast<std::size_t>(s.pooled.size()));
        }
    }

    T forward(std::span<const T> input) {
        if (input.size() != arch_.input_size()) throw ParameterError("input size does not match architecture");
        standardize(input);
        const T* in = standardized_.data();
        for (std::size_t l = 0; l < blocks_.size(); ++l) {
            const auto& b = blocks_[l];
            auto& s = states_[l];
            im2col(in, b, s.cols);
            const ConstMap weights(params_.data() + layout_.conv_weight[l], b.out_channels,
                                   static_cast<Eigen::Index>(b.in_channels) * 9);
            const Eigen::Map<const Vec> bias(params_.data() + layout_.conv_bias[l], b.out_channels);
            s.act.noalias() = weights * s.cols;
            s.act.colwise() += bias;
            s.act = s.act.cwiseMax(T(0));
            max_pool(b, s);
            in = s.pooled.data();
        }
        const auto& last = states_.back();
        features_ = last.pooled.rowwise().mean();
        const Eigen::Map<const Vec> out_w(params_.data() + layout_.out_weight, features_.size());
        const T y = out_w.dot(features_) + params_[layout_.out_bias];
        if (!std::isfinite(static_cast<double>(y))) {
            throw TrainingError("non-finite network output");
        }
        return y;
    }

    // Accumulates d(output)/d(params) * dy into grad; forward() must have run.
    void backward(T dy, std::span<T> grad) {
        const Eigen::Index channels = features_.size();
        Eigen::Map<Vec>(grad.data() + layout_.out_weight, channels) += dy * features_;
        grad[layout_.out_bias] += dy;

        const auto& last = states_.back();
        const Eigen::Map<const Vec> out_w(params_.data() + layout_.out_weight, channels);
        d_pooled_.resize(last.pooled.rows(), last.pooled.cols());
        const T inv_count = T(1) / static_cast<T>(last.pooled.cols());
        for (Eigen::Index c = 0; c < channels; ++c) d_pooled_.row(c).setConstant(dy * out_w[c] * inv_count);

        for (std::size_t l = blocks_.size(); l-- > 0;) {
            const auto& b = blocks_[l];
            auto& s = states_[l];
            d_act_.setZero(s.act.rows(), s.act.cols());
            for (Eigen::Index c = 0; c < d_pooled_.rows(); ++c) {
                for (Eigen::Index q = 0; q < d_pooled_.cols(); ++q) {
                    const int p = s.argmax[static_cast<std::size_t>(c * d_pooled_.cols() + q)];
                    d_act_(c, p) += d_pooled_(c, q);
                }
            }
            // ReLU gate: act > 0 exactly where the pre-activation was positive
            d_act_ = (s.act.array() > T(0)).select(d_act_, T(0));
            MutMap d_weights(grad.data() + layout_.conv_weight[l], b.out_channels,
                             static_cast<Eigen::Index>(b.in_channels) * 9);
            d_weights.noalias() += d_act_ * s.cols.transpose();
            Eigen::Map<Vec>(grad.data() + layout_.conv_bias[l], b.out_channels) += d_act_.rowwise().sum();
            if (l == 0) break;
            const ConstMap weights(params_.data() + layout_.conv_weight[l], b.out_channels,
                                   static_cast<Eigen::Index>(b.in_channels) * 9);
            d_cols_.noalias() = weights.transpose() * d_act_;
            d_pooled_.setZero(b.in_channels, static_cast<Eigen::Index>(b.height) * b.width);
            col2im(d_cols_, b, d_pooled_);
        }
    }

    double loss_and_gradient(std::span<const std::span<const T>> inputs, std::span<const double> targets,
                             double weight_decay, std::span<T> grad) {
        if (inputs.size() != targets.size() || inputs.empty()) {
            throw ParameterError("batch inputs and targets must be non-empty and equal length");
        }
        if (grad.size() != layout_.total) throw ParameterError("gradient buffer has the wrong size");
        std::fill(grad.begin(), grad.end(), T(0));
        const double scale = 2.0 / static_cast<double>(inputs.size());
        double total = 0.0;
        for (std::size_t i = 0; i < inputs.size(); ++i) {
            const double diff = static_cast<double>(forward(inputs[i])) - targets[i];
            total += diff * diff;
            backward(static_cast<T>(scale * diff), grad);
        }
        for (std::size_t k = 0; k < grad.size(); ++k) {
            grad[k] += static_cast<T>(weight_decay) * params_[k];
            if (!std::isfinite(static_cast<double>(grad[k]))) {
                throw TrainingError("non-finite gradient at parameter " + std::to_string(k));
            }
        }
        return total / static_cast<double>(inputs.size());
    }

private:
    // Zero mean, unit variance per example; the deviation is floored at one
    // grey level so flat crops map to all zeros.
    void standardize(std::span<const T> input) {
        standardized_.resize(input.size());
        double sum = 0.0;
        for (const T v : input) sum += static_cast<double>(v);
        const double mean = sum / static_cast<double>(input.size());
        double var = 0.0;
        for (const T v : input) var += (static_cast<double>(v) - mean) * (static_cast<double>(v) - mean);
        const double sd = std::max(std::sqrt(var / static_cast<double>(input.size())), kMinInputDeviation);
        for (std::size_t i = 0; i < input.size(); ++i) {
            standardized_[i] = static_cast<T>((static_cast<double>(input[i]) - mean) / sd);
        }
    }

    struct BlockState {
        Mat cols;
        Mat act;
        Mat pooled;
        std::vector<int> argmax;
    };

    static void im2col(const T* in, const ArchDescriptor::Block& b, Mat& cols) {
        const int h = b.height;
        const int w = b.width;
        for (int c = 0; c < b.in_channels; ++c) {
            const T* plane = in + static_cast<std::size_t>(c) * h * w;
            for (int ky = 0; ky < 3; ++ky) {
                for (int kx = 0; kx < 3; ++kx) {
                    T* row = cols.row(c * 9 + ky * 3 + kx).data();
                    for (int y = 0; y < h; ++y) {
                        const int sy = y + ky - 1;
                        T* out = row + static_cast<std::size_t>(y) * w;
                        if (sy < 0 || sy >= h) {
                            std::fill(out, out + w, T(0));
                            continue;
                        }
                        const T* src = plane + static_cast<std::size_t>(sy) * w;
                        for (int x = 0; x < w; ++x) {
                            const int sx = x + kx - 1;
                            out[x] = (sx < 0 || sx >= w) ? T(0) : src[sx];
                        }
                    }
                }
            }
        }
    }

    static void col2im(const Mat& d_cols, const ArchDescriptor::Block& b, Mat& d_in) {
        const int h = b.height;
        const int w = b.width;
        for (int c = 0; c < b.in_channels; ++c) {
            T* plane = d_in.row(c).data();
            for (int ky = 0; ky < 3; ++ky) {
                for (int kx = 0; kx < 3; ++kx) {
                    const T* row = d_cols.row(c * 9 + ky * 3 + kx).data();
                    for (int y = 0; y < h; ++y) {
                        const int sy = y + ky - 1;
                        if (sy < 0 || sy >= h) continue;
                        T* dst = plane + static_cast<std::size_t>(sy) * w;
                        const T* src = row + static_cast<std::size_t>(y) * w;
                        for (int x = 0; x < w; ++x) {
                            const int sx = x + kx - 1;
                            if (sx >= 0 && sx < w) dst[sx] += src[x];
                        }
                    }
                }
            }
        }
    }

    static void max_pool(const ArchDescriptor::Block& b, BlockState& s) {
        const int w = b.width;
        const int ph = b.pooled_height;
        const int pw = b.pooled_width;
        for (int c = 0; c < b.out_channels; ++c) {
            const T* plane = s.act.row(c).data();
            T* out = s.pooled.row(c).data();
            int* arg = s.argmax.data() + static_cast<std::size_t>(c) * ph * pw;
            for (int py = 0; py < ph; ++py) {
                for (int px = 0; px < pw; ++px) {
                    int best = (2 * py) * w + 2 * px;
                    for (int p : {best + 1, best + w, best + w + 1}) {
                        if (plane[p] > plane[best]) best = p;
                    }
                    out[py * pw + px] = plane[best];
                    arg[py * pw + px] = best;
                }
            }
        }
    }

    const ArchDescriptor& arch_;
    ParameterLayout layout_;
    std::vector<ArchDescriptor::Block> blocks_;
    std::span<const T> params_;
    std::vector<BlockState> states_;
    Vec features_;
    std::vector<T> standardized_;
    Mat d_pooled_;
    Mat d_act_;
    Mat d_cols_;
};

}  // namespace docqa::detail
