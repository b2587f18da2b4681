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

#include "fedwelfare/dataset.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "fedwelfare/common.h"

namespace fedwelfare {

LabeledDataset::LabeledDataset(std::size_t num_features, int num_classes)
    : num_features_(num_features), num_classes_(num_classes) {
  if (num_classes < 2) throw ValidationError("need at least two classes");
  if (num_features == 0) throw ValidationError("need at least one feature");
}

LabeledDataset::LabeledDataset(std::size_t num_features, int num_classes,
                               std::vector<double> features,
                               std::vector<int> labels)
    : LabeledDataset(num_features, num_classes) {
  if (features.size() != labels.size() * num_features) {
    throw StructuralError("feature rows and label count differ");
  }
  if (!std::all_of(features.begin(), features.end(),
                   [](double v) { return std::isfinite(v); })) {
    throw ValidationError("features must be finite");
  }
  for (int y : labels) {
    if (y < 0 || y >= num_classes) {
      throw ValidationError("label " + std::to_string(y) + " out of range");
    }
  }
  features_ = std::move(features);
  labels_ = std::move(labels);
}

void LabeledDataset::append(std::span<const double> features, int label) {
  if (features.size() != num_features_) {
    throw StructuralError("feature width mismatch");
  }
  if (label < 0 || label >= num_classes_) {
    throw ValidationError("label " + std::to_string(label) + " out of range");
  }
  features_.insert(features_.end(), features.begin(), features.end());
  labels_.push_back(label);
}

void LabeledDataset::append(const LabeledDataset& other) {
  if (other.num_features_ != num_features_ ||
      other.num_classes_ != num_classes_) {
    throw StructuralError("dataset shapes differ");
  }
  features_.insert(features_.end(), other.features_.begin(),
                   other.features_.end());
  labels_.insert(labels_.end(), other.labels_.begin(), other.labels_.end());
}

}  // namespace fedwelfare
