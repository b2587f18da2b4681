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

#ifndef FEDWELFARE_DATASET_H_
#define FEDWELFARE_DATASET_H_

#include <cstddef>
#include <span>
#include <vector>

namespace fedwelfare {

// Row-major feature matrix with integer class labels in [0, num_classes).
class LabeledDataset {
 public:
  LabeledDataset() = default;
  LabeledDataset(std::size_t num_features, int num_classes);
  LabeledDataset(std::size_t num_features, int num_classes,
                 std::vector<double> features, std::vector<int> labels);

  std::size_t rows() const { return labels_.size(); }
  std::size_t num_features() const { return num_features_; }
  int num_classes() const { return num_classes_; }
  bool empty() const { return labels_.empty(); }

  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(features_).subspan(i * num_features_,
                                                      num_features_);
  }
  int label(std::size_t i) const { return labels_[i]; }
  const std::vector<double>& features() const { return features_; }
  const std::vector<int>& labels() const { return labels_; }

  void append(std::span<const double> features, int label);
  void append(const LabeledDataset& other);

 private:
  std::size_t num_features_ = 0;
  int num_classes_ = 0;
  std::vector<double> features_;
  std::vector<int> labels_;
};

}  // namespace fedwelfare

#endif  // FEDWELFARE_DATASET_H_
