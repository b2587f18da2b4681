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

#include "fedwelfare/param_vector.h"

#include <algorithm>
#include <cmath>

#include "fedwelfare/common.h"

namespace fedwelfare {

ParamLayout::ParamLayout(std::vector<LayerSpan> spans)
    : spans_(std::move(spans)) {
  bool has_shared = false;
  for (const LayerSpan& span : spans_) {
    if (span.offset != total_size_) {
      throw StructuralError("layer '" + span.name +
                            "' does not start where the previous one ends");
    }
    if (span.size == 0) {
      throw StructuralError("layer '" + span.name + "' is empty");
    }
    total_size_ += span.size;
    has_shared |= span.partition == Partition::kShared;
  }
  if (!has_shared) throw StructuralError("layout has no shared span");
  for (std::size_t i = 0; i < spans_.size(); ++i) {
    for (std::size_t j = i + 1; j < spans_.size(); ++j) {
      if (spans_[i].name == spans_[j].name) {
        throw StructuralError("duplicate layer name '" + spans_[i].name + "'");
      }
    }
  }
}

const LayerSpan& ParamLayout::find(const std::string& name) const {
  auto it = std::find_if(spans_.begin(), spans_.end(),
                         [&](const LayerSpan& s) { return s.name == name; });
  if (it == spans_.end()) throw StructuralError("no layer named '" + name + "'");
  return *it;
}

ParamVector::ParamVector(ParamLayout layout, std::vector<double> values)
    : layout_(std::move(layout)), values_(std::move(values)) {
  if (values_.size() != layout_.total_size()) {
    throw StructuralError("parameter count does not match layout");
  }
  if (!all_finite()) throw ValidationError("parameters must be finite");
}

ParamVector::ParamVector(ParamLayout layout)
    : layout_(std::move(layout)), values_(layout_.total_size(), 0.0) {}

std::span<double> ParamVector::layer(const std::string& name) {
  return layer(layout_.find(name));
}

std::span<const double> ParamVector::layer(const std::string& name) const {
  return layer(layout_.find(name));
}

std::span<double> ParamVector::layer(const LayerSpan& span) {
  return std::span<double>(values_).subspan(span.offset, span.size);
}

std::span<const double> ParamVector::layer(const LayerSpan& span) const {
  return std::span<const double>(values_).subspan(span.offset, span.size);
}

bool ParamVector::all_finite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return std::isfinite(v); });
}

void copy_local_spans(const ParamVector& source, ParamVector& target) {
  if (!(source.layout() == target.layout())) {
    throw StructuralError("layout mismatch");
  }
  for (const LayerSpan& span : source.layout().spans()) {
    if (span.partition != Partition::kLocal) continue;
    auto from = source.layer(span);
    std::copy(from.begin(), from.end(), target.layer(span).begin());
  }
}

}  // namespace fedwelfare
