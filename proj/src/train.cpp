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

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "docqa/error.hpp"
#include "docqa/predict.hpp"
#include "docqa/random.hpp"
#include "network_impl.hpp"

namespace docqa {

namespace {

double mean_loss(detail::Evaluator<float>& eval, const std::vector<TrainingExample>& examples,
                 const std::vector<std::size_t>& indices) {
    if (indices.empty()) return std::numeric_limits<double>::quiet_NaN();
    double total = 0.0;
    for (auto i : indices) {
        const double d = static_cast<double>(eval.forward(examples[i].input.values)) - examples[i].label;
        total += d * d;
    }
    return total / static_cast<double>(indices.size());
}

}  // namespace

void TrainConfig::validate() const {
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
        throw ParameterError("learning rate must be finite and non-negative");
    }
    if (!(weight_decay >= 0.0) || !std::isfinite(weight_decay)) {
        throw ParameterError("weight decay must be finite and non-negative");
    }
    if (batch_size < 1) throw ParameterError("batch size must be at least 1");
    if (epochs < 0) throw ParameterError("epoch count must be non-negative");
    if (!(val_fraction >= 0.0 && val_fraction < 1.0)) {
        throw ParameterError("validation fraction must lie in [0, 1)");
    }
    arch.validate();
}

std::string EpochLog::to_json() const {
    nlohmann::json j{{"epoch", epoch}, {"train_loss", train_loss}, {"lr", learning_rate},
                     {"weight_decay", weight_decay}};
    if (std::isnan(val_loss)) {
        j["val_loss"] = nullptr;
    } else {
        j["val_loss"] = val_loss;
    }
    return j.dump();
}

std::vector<TrainingExample> make_examples(const std::vector<TextLineSample>& samples) {
    std::vector<TrainingExample> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back({normalize_for_model(s.image), s.label});
    return out;
}

TrainingResult train(const std::vector<TrainingExample>& examples, const TrainConfig& cfg,
                     const EpochCallback& on_epoch) {
    cfg.validate();
    if (examples.empty()) throw ParameterError("training set is empty");
    for (const auto& e : examples) {
        if (e.input.values.size() != cfg.arch.input_size()) {
            throw ParameterError("training input does not match the architecture input shape");
        }
        if (!(e.label > 0.0 && e.label <= 1.0)) throw ParameterError("training labels must lie in (0, 1]");
    }

    std::vector<std::size_t> order(examples.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng split_rng(derive_seed(cfg.seed, 0));
    split_rng.shuffle(std::span(order));
    std::size_t val_count = static_cast<std::size_t>(std::lround(cfg.val_fraction * examples.size()));
    if (val_count >= examples.size()) val_count = examples.size() - 1;
    std::vector<std::size_t> val_idx(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(val_count));
    std::vector<std::size_t> train_idx(order.begin() + static_cast<std::ptrdiff_t>(val_count), order.end());

    TrainingResult result;
    PredictorModel model = init_model(cfg.arch, derive_seed(cfg.seed, 1));
    std::vector<float> grad(model.params.size());
    detail::Evaluator<float> eval(model.arch, model.params);

    auto record = [&](const EpochLog& entry) {
        result.log.push_back(entry);
        if (on_epoch) on_epoch(entry);
    };
    auto selection_loss = [](const EpochLog& e) { return std::isnan(e.val_loss) ? e.train_loss : e.val_loss; };

    EpochLog initial{0, mean_loss(eval, examples, train_idx), mean_loss(eval, examples, val_idx),
                     cfg.learning_rate, cfg.weight_decay};
    record(initial);
    result.model = model;
    result.best_epoch = 0;
    double best = selection_loss(initial);

    const auto lr = static_cast<float>(cfg.learning_rate);
    const auto batch = static_cast<std::size_t>(cfg.batch_size);
    std::vector<std::span<const float>> inputs;
    std::vector<double> targets;
    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        Rng epoch_rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(epoch) + 1));
        epoch_rng.shuffle(std::span(train_idx));
        double running = 0.0;
        for (std::size_t start = 0; start < train_idx.size(); start += batch) {
            const std::size_t stop = std::min(train_idx.size(), start + batch);
            inputs.clear();
            targets.clear();
            for (std::size_t k = start; k < stop; ++k) {
                inputs.emplace_back(examples[train_idx[k]].input.values);
                targets.push_back(examples[train_idx[k]].label);
            }
            double batch_loss;
            try {
                batch_loss = eval.loss_and_gradient(inputs, targets, cfg.weight_decay, grad);
            } catch (const TrainingError& e) {
                throw TrainingError("epoch " + std::to_string(epoch) + ", batch starting at " +
                                    std::to_string(start) + ": " + e.what());
            }
            running += batch_loss * static_cast<double>(stop - start);
            // the decay term is already folded into grad
            for (std::size_t k = 0; k < model.params.size(); ++k) model.params[k] -= lr * grad[k];
        }
        EpochLog entry{epoch, running / static_cast<double>(train_idx.size()),
                       mean_loss(eval, examples, val_idx), cfg.learning_rate, cfg.weight_decay};
        record(entry);
        if (selection_loss(entry) < best) {
            best = selection_loss(entry);
            result.model = model;
            result.best_epoch = epoch;
        }
    }
    return result;
}

TrainingResult train(const DatasetManifest& dataset, const TrainConfig& cfg, const EpochCallback& on_epoch) {
    cfg.validate();
    if (dataset.records.empty()) throw ParameterError("dataset is empty");
    std::vector<TrainingExample> examples;
    examples.reserve(dataset.records.size());
    for (const auto& r : dataset.records) {
        examples.push_back({normalize_for_model(read_pgm(dataset.image_path(r))), r.label});
    }
    return train(examples, cfg, on_epoch);
}

CnnPredictor::CnnPredictor(PredictorModel model) : model_(std::move(model)) { model_.validate(); }

QualityScore CnnPredictor::score(const GrayImage& crop) const {
    return forward(model_, normalize_for_model(crop));
}

}  // namespace docqa
