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

#ifndef FEDWELFARE_PARAM_VECTOR_H_
#define FEDWELFARE_PARAM_VECTOR_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace fedwelfare {

// Shared spans are averaged by the server; local spans stay with the client
// under FedBN.
enum class Partition { kShared, kLocal };

struct LayerSpan {
  std::string name;
  std::size_t offset = 0;
  std::size_t size = 0;
  Partition partition = Partition::kShared;

  bool operator==(const LayerSpan&) const = default;
};

// Ordered, gap-free partition of a flat parameter array into named layers.
class ParamLayout {
 public:
  ParamLayout() = default;
  // Spans must be contiguous from offset 0, non-empty, and include at least
  // one shared span. Throws StructuralError otherwise.
  explicit ParamLayout(std::vector<LayerSpan> spans);

  const std::vector<LayerSpan>& spans() const { return spans_; }
  std::size_t total_size() const { return total_size_; }
  const LayerSpan& find(const std::string& name) const;

  bool operator==(const ParamLayout&) const = default;

 private:
  std::vector<LayerSpan> spans_;
  std::size_t total_size_ = 0;
};

// Flat model parameters with their layout.
class ParamVector {
 public:
  ParamVector() = default;
  ParamVector(ParamLayout layout, std::vector<double> values);
  explicit ParamVector(ParamLayout layout);  // zero-filled

  const ParamLayout& layout() const { return layout_; }
  std::size_t size() const { return values_.size(); }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  std::span<double> layer(const std::string& name);
  std::span<const double> layer(const std::string& name) const;
  std::span<double> layer(const LayerSpan& span);
  std::span<const double> layer(const LayerSpan& span) const;

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  bool all_finite() const;

  bool operator==(const ParamVector&) const = default;

 private:
  ParamLayout layout_;
  std::vector<double> values_;
};

// Copies the local-partition spans of `source` into `target`.
void copy_local_spans(const ParamVector& source, ParamVector& target);

}  // namespace fedwelfare

#endif  // FEDWELFARE_PARAM_VECTOR_H_
