// Copyright 2026 The fedwelfare Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FEDWELFARE_MODEL_H_
#define FEDWELFARE_MODEL_H_

#include <cstddef>
#include <span>

#include "fedwelfare/common.h"
#include "fedwelfare/dataset.h"
#include "fedwelfare/param_vector.h"

namespace fedwelfare {

// Softmax classifier preceded by a per-feature normalization layer:
//
//   z = (x - norm.shift) * norm.scale
//   logits = dense.weight * z + dense.bias
//
// The normalization spans form the local partition (the FedBN exclusion
// set). They are estimated from local training data, never by gradient.
namespace layers {
inline constexpr const char* kNormShift = "norm.shift";
inline constexpr const char* kNormScale = "norm.scale";
inline constexpr const char* kDenseWeight = "dense.weight";
inline constexpr const char* kDenseBias = "dense.bias";
}  // namespace layers

ParamLayout classifier_layout(std::size_t num_features, int num_classes);

// Weights ~ N(0, 0.01^2), biases 0, shift 0, scale 1.
ParamVector init_classifier(std::size_t num_features, int num_classes,
                            Rng& rng);

struct TrainerConfig {
  int epochs = 1;
  int batch_size = 32;
  double learning_rate = 0.05;
  // Blend factor toward the local training-set statistics applied to the
  // normalization spans at the start of every local update. 0 freezes them.
  double norm_momentum = 1.0;
};

// Added to per-feature variance before taking 1/sqrt.
inline constexpr double kNormVarianceFloor = 1e-2;

// Mean multinomial cross-entropy over the given rows (all rows if empty).
double cross_entropy(const ParamVector& model, const LabeledDataset& data,
                     std::span<const std::size_t> rows = {});

// Gradient of cross_entropy with respect to every parameter. Normalization
// spans are not trainable, so their entries are zero.
ParamVector cross_entropy_gradient(const ParamVector& model,
                                   const LabeledDataset& data,
                                   std::span<const std::size_t> rows = {});

// Class scores for one feature row.
void class_scores(const ParamVector& model, std::span<const double> x,
                  std::span<double> scores);

struct LocalUpdateResult {
  ParamVector model;
  long iterations = 0;  // mini-batch steps taken
};

// K epochs of shuffled mini-batch SGD. An empty dataset is a no-op that
// reports zero iterations.
LocalUpdateResult local_update(const ParamVector& model,
                               const LabeledDataset& data,
                               const TrainerConfig& cfg, Rng& rng);

// Fraction of rows whose argmax class (lowest id on ties) equals the label.
// Throws ValidationError on an empty dataset.
double evaluate_accuracy(const ParamVector& model, const LabeledDataset& data);

}  // namespace fedwelfare

#endif  // FEDWELFARE_MODEL_H_
