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
#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "docqa/gray_image.hpp"
#include "docqa/imgproc.hpp"
#include "docqa/synth.hpp"

namespace docqa {

// ---------------------------------------------------------------------------
// Architecture and parameters
// ---------------------------------------------------------------------------

// Per-example input standardization (parameter free), then a stack of
// [conv 3x3 (stride 1, pad 1) -> ReLU -> maxpool 2x2] blocks, global average
// pooling and a single linear output neuron.
// Floor on the input standard deviation used by the standardization step.
inline constexpr double kMinInputDeviation = 1.0 / 255.0;

struct ArchDescriptor {
    int in_channels = 1;
    int in_height = kModelInputHeight;
    int in_width = kModelInputWidth;
    std::vector<int> conv_channels{16, 32, 64};

    struct Block {
        int in_channels;
        int out_channels;
        int height;  // conv resolution (input of the block)
        int width;
        int pooled_height;
        int pooled_width;
    };

    void validate() const;
    std::vector<Block> blocks() const;
    std::size_t parameter_count() const;
    std::size_t input_size() const {
        return static_cast<std::size_t>(in_channels) * in_height * in_width;
    }

    friend bool operator==(const ArchDescriptor&, const ArchDescriptor&) = default;
};

// Offsets of each tensor inside the flat parameter vector. Per block: weights
// [out][in][3][3] then biases [out]; finally the output weights [C] and bias.
struct ParameterLayout {
    std::vector<std::size_t> conv_weight;
    std::vector<std::size_t> conv_bias;
    std::size_t out_weight = 0;
    std::size_t out_bias = 0;
    std::size_t total = 0;

    explicit ParameterLayout(const ArchDescriptor& arch);
};

struct PredictorModel {
    static constexpr std::uint32_t kFormatVersion = 1;

    ArchDescriptor arch;
    std::vector<float> params;
    std::uint32_t version = kFormatVersion;

    void validate() const;
};

struct QualityScore {
    double value = 0.0;  // clamped to [0, 1]
    double raw = 0.0;    // unclamped regression output

    static QualityScore from_raw(double raw);
};

// Conv weights ~ N(0, 2 / fan_in), conv biases 0, output weights
// ~ U(-0.1, 0.1), output bias 0. Deterministic in `seed`.
PredictorModel init_model(const ArchDescriptor& arch, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Network evaluation (T = float for training and inference, double for checks)
// ---------------------------------------------------------------------------

template <typename T>
T forward_raw(const ArchDescriptor& arch, std::span<const T> params, std::span<const T> input);

// Objective = mean over the batch of (prediction - target)^2
//           + weight_decay / 2 * ||params||^2.
// Writes d(objective)/d(params) into `grad` and returns the data term alone.
// Throws TrainingError on non-finite activations.
template <typename T>
double loss_and_gradient(const ArchDescriptor& arch, std::span<const T> params,
                         std::span<const std::span<const T>> inputs, std::span<const double> targets,
                         double weight_decay, std::span<T> grad);

// The same objective without gradients.
template <typename T>
double batch_objective(const ArchDescriptor& arch, std::span<const T> params,
                       std::span<const std::span<const T>> inputs, std::span<const double> targets,
                       double weight_decay);

QualityScore forward(const PredictorModel& model, const ModelInput& input);

// Squared error of one prediction.
double loss(double prediction, double target);
// Mean squared error over a batch.
double loss_batch(std::span<const double> predictions, std::span<const double> targets);

// ---------------------------------------------------------------------------
// Checkpoints
// ---------------------------------------------------------------------------

// "DIQM", u32 version, u32 in_channels, in_height, in_width, block count,
// per-block channels, u64 parameter count, then little-endian float32 values.
std::vector<std::uint8_t> serialize_model(const PredictorModel& model);
PredictorModel deserialize_model(std::span<const std::uint8_t> bytes);
void save_model(const PredictorModel& model, const std::filesystem::path& path);
PredictorModel load_model(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Training
// ---------------------------------------------------------------------------

struct TrainConfig {
    double learning_rate = 5e-3;
    double weight_decay = 1e-4;
    int batch_size = 32;
    int epochs = 10;
    std::uint64_t seed = 1;
    double val_fraction = 0.1;
    ArchDescriptor arch;

    void validate() const;
};

struct EpochLog {
    int epoch = 0;  // 0 records the untrained model
    double train_loss = 0.0;
    double val_loss = 0.0;  // NaN when there is no validation split
    double learning_rate = 0.0;
    double weight_decay = 0.0;

    // {"epoch":..,"train_loss":..,"val_loss":..,"lr":..,"weight_decay":..}
    std::string to_json() const;
};

struct TrainingExample {
    ModelInput input;
    double label = 0.0;
};

struct TrainingResult {
    PredictorModel model;  // best-validation parameters
    std::vector<EpochLog> log;
    int best_epoch = 0;
};

using EpochCallback = std::function<void(const EpochLog&)>;

// Plain minibatch SGD: params -= lr * (grad + weight_decay * params), with
// the training order reshuffled every epoch from the seed.
TrainingResult train(const std::vector<TrainingExample>& examples, const TrainConfig& cfg,
                     const EpochCallback& on_epoch = {});
TrainingResult train(const DatasetManifest& dataset, const TrainConfig& cfg,
                     const EpochCallback& on_epoch = {});

std::vector<TrainingExample> make_examples(const std::vector<TextLineSample>& samples);

// ---------------------------------------------------------------------------
// Line predictors
// ---------------------------------------------------------------------------

// Scores one text-line crop. Implementations must be safe to share across threads.
class LinePredictor {
public:
    virtual ~LinePredictor() = default;
    virtual QualityScore score(const GrayImage& crop) const = 0;
    virtual std::string name() const = 0;
};

class CnnPredictor final : public LinePredictor {
public:
    explicit CnnPredictor(PredictorModel model);
    QualityScore score(const GrayImage& crop) const override;
    std::string name() const override { return "cnn"; }

private:
    PredictorModel model_;
};

// Blur estimate of a crop in pixels: the ratio of gradient energy after an
// extra reference Gaussian blur to the energy before it is inverted through
// the Gaussian semigroup (variances add), then corrected for the truncated
// synthesis kernel. Throws NoSignalError for crops with intensity range < 5.
double estimate_blur_sigma(const GrayImage& crop, int kernel_size = 11);

// estimate_blur_sigma clamped to [0.5, 4.5] and mapped through the label function.
QualityScore analytic_predict(const GrayImage& crop, const LabelFnConfig& cfg = {});

class AnalyticPredictor final : public LinePredictor {
public:
    explicit AnalyticPredictor(LabelFnConfig cfg = {}) : cfg_(cfg) {}
    QualityScore score(const GrayImage& crop) const override { return analytic_predict(crop, cfg_); }
    std::string name() const override { return "analytic"; }

private:
    LabelFnConfig cfg_;
};

}  // namespace docqa
