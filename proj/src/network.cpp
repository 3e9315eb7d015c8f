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

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "docqa/error.hpp"
#include "docqa/predict.hpp"
#include "docqa/random.hpp"
#include "network_impl.hpp"

namespace docqa {

void ArchDescriptor::validate() const {
    if (in_channels < 1 || in_height < 1 || in_width < 1) {
        throw ParameterError("network input shape must be positive");
    }
    if (conv_channels.empty()) throw ParameterError("network needs at least one conv block");
    int h = in_height;
    int w = in_width;
    for (int c : conv_channels) {
        if (c < 1) throw ParameterError("conv channel counts must be positive");
        h /= 2;
        w /= 2;
        if (h < 1 || w < 1) throw ParameterError("input too small for the number of pooling stages");
    }
}

std::vector<ArchDescriptor::Block> ArchDescriptor::blocks() const {
    validate();
    std::vector<Block> out;
    int c = in_channels;
    int h = in_height;
    int w = in_width;
    for (int oc : conv_channels) {
        out.push_back({c, oc, h, w, h / 2, w / 2});
        c = oc;
        h /= 2;
        w /= 2;
    }
    return out;
}

std::size_t ArchDescriptor::parameter_count() const { return ParameterLayout(*this).total; }

ParameterLayout::ParameterLayout(const ArchDescriptor& arch) {
    std::size_t offset = 0;
    for (const auto& b : arch.blocks()) {
        conv_weight.push_back(offset);
        offset += static_cast<std::size_t>(b.out_channels) * b.in_channels * 9;
        conv_bias.push_back(offset);
        offset += static_cast<std::size_t>(b.out_channels);
    }
    out_weight = offset;
    offset += static_cast<std::size_t>(arch.conv_channels.back());
    out_bias = offset;
    total = offset + 1;
}

void PredictorModel::validate() const {
    arch.validate();
    if (params.size() != arch.parameter_count()) {
        throw ParameterError("parameter vector length " + std::to_string(params.size()) +
                             " does not match architecture (" +
                             std::to_string(arch.parameter_count()) + ")");
    }
    if (!std::all_of(params.begin(), params.end(), [](float v) { return std::isfinite(v); })) {
        throw ParameterError("model parameters must be finite");
    }
}

QualityScore QualityScore::from_raw(double raw) {
    return {std::clamp(raw, 0.0, 1.0), raw};
}

PredictorModel init_model(const ArchDescriptor& arch, std::uint64_t seed) {
    const ParameterLayout layout(arch);
    PredictorModel model;
    model.arch = arch;
    model.params.assign(layout.total, 0.0F);
    Rng rng(seed);
    const auto blocks = arch.blocks();
    for (std::size_t l = 0; l < blocks.size(); ++l) {
        const double fan_in = blocks[l].in_channels * 9.0;
        const double stddev = std::sqrt(2.0 / fan_in);
        const std::size_t count = static_cast<std::size_t>(blocks[l].out_channels) * blocks[l].in_channels * 9;
        for (std::size_t i = 0; i < count; ++i) {
            model.params[layout.conv_weight[l] + i] = static_cast<float>(rng.normal(0.0, stddev));
        }
    }
    for (int c = 0; c < arch.conv_channels.back(); ++c) {
        float v;
        do {
            v = static_cast<float>(rng.uniform(-0.1, 0.1));
        } while (!(v > -0.1F && v < 0.1F));
        model.params[layout.out_weight + static_cast<std::size_t>(c)] = v;
    }
    return model;
}

template <typename T>
T forward_raw(const ArchDescriptor& arch, std::span<const T> params, std::span<const T> input) {
    detail::Evaluator<T> eval(arch, params);
    return eval.forward(input);
}

template <typename T>
double loss_and_gradient(const ArchDescriptor& arch, std::span<const T> params,
                         std::span<const std::span<const T>> inputs, std::span<const double> targets,
                         double weight_decay, std::span<T> grad) {
    detail::Evaluator<T> eval(arch, params);
    return eval.loss_and_gradient(inputs, targets, weight_decay, grad);
}

template <typename T>
double batch_objective(const ArchDescriptor& arch, std::span<const T> params,
                       std::span<const std::span<const T>> inputs, std::span<const double> targets,
                       double weight_decay) {
    if (inputs.size() != targets.size() || inputs.empty()) {
        throw ParameterError("batch inputs and targets must be non-empty and equal length");
    }
    detail::Evaluator<T> eval(arch, params);
    double total = 0.0;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        const double diff = static_cast<double>(eval.forward(inputs[i])) - targets[i];
        total += diff * diff;
    }
    double norm = 0.0;
    for (T p : params) norm += static_cast<double>(p) * static_cast<double>(p);
    return total / static_cast<double>(inputs.size()) + 0.5 * weight_decay * norm;
}

template float forward_raw<float>(const ArchDescriptor&, std::span<const float>, std::span<const float>);
template double forward_raw<double>(const ArchDescriptor&, std::span<const double>, std::span<const double>);
template double loss_and_gradient<float>(const ArchDescriptor&, std::span<const float>,
                                         std::span<const std::span<const float>>,
                                         std::span<const double>, double, std::span<float>);
template double loss_and_gradient<double>(const ArchDescriptor&, std::span<const double>,
                                          std::span<const std::span<const double>>,
                                          std::span<const double>, double, std::span<double>);
template double batch_objective<float>(const ArchDescriptor&, std::span<const float>,
                                       std::span<const std::span<const float>>,
                                       std::span<const double>, double);
template double batch_objective<double>(const ArchDescriptor&, std::span<const double>,
                                        std::span<const std::span<const double>>,
                                        std::span<const double>, double);

QualityScore forward(const PredictorModel& model, const ModelInput& input) {
    if (model.arch.in_channels != 1 || input.width != model.arch.in_width ||
        input.height != model.arch.in_height ||
        input.values.size() != model.arch.input_size()) {
        throw ParameterError("model input shape " + std::to_string(input.width) + "x" +
                             std::to_string(input.height) + " does not match architecture");
    }
    const float raw = forward_raw<float>(model.arch, model.params, input.values);
    return QualityScore::from_raw(static_cast<double>(raw));
}

double loss(double prediction, double target) {
    const double d = prediction - target;
    return d * d;
}

double loss_batch(std::span<const double> predictions, std::span<const double> targets) {
    if (predictions.size() != targets.size()) {
        throw ParameterError("prediction and target vectors differ in length");
    }
    if (predictions.empty()) throw ParameterError("empty batch");
    double total = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) total += loss(predictions[i], targets[i]);
    return total / static_cast<double>(predictions.size());
}

}  // namespace docqa
