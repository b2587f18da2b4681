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

#ifndef FEDWELFARE_IDX_H_
#define FEDWELFARE_IDX_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>

#include "fedwelfare/dataset.h"

namespace fedwelfare {

enum class IdxErrorKind { kIo, kMagicMismatch, kCountMismatch, kTruncated, kBadLabel };

// Parse failure in an IDX file; `field()` names the offending header field
// or section (e.g. "images.magic", "labels.count", "images.pixels").
class IdxError : public std::runtime_error {
 public:
  IdxError(IdxErrorKind kind, std::string field, const std::string& message)
      : std::runtime_error(message), kind_(kind), field_(std::move(field)) {}

  IdxErrorKind kind() const { return kind_; }
  const std::string& field() const { return field_; }

 private:
  IdxErrorKind kind_;
  std::string field_;
};

inline constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

// Big-endian IDX pair: unsigned-byte images (n, rows, cols) and labels (n).
// Pixels are scaled by 1/255 and flattened row-major.
LabeledDataset parse_idx(std::span<const std::uint8_t> images,
                         std::span<const std::uint8_t> labels,
                         int num_classes = 10);

LabeledDataset load_idx(const std::filesystem::path& images_path,
                        const std::filesystem::path& labels_path,
                        int num_classes = 10);

}  // namespace fedwelfare

#endif  // FEDWELFARE_IDX_H_
