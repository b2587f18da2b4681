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

#include "fedwelfare/idx.h"

#include <fstream>
#include <iterator>
#include <vector>

namespace fedwelfare {
namespace {

class Reader {
 public:
  Reader(std::span<const std::uint8_t> bytes, std::string file)
      : bytes_(bytes), file_(std::move(file)) {}

  std::uint32_t u32(const std::string& field) {
    need(4, field);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | bytes_[pos_++];
    return v;
  }

  std::span<const std::uint8_t> take(std::size_t n, const std::string& field) {
    need(n, field);
    auto out = bytes_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

 private:
  void need(std::size_t n, const std::string& field) {
    if (bytes_.size() - pos_ < n) {
      throw IdxError(IdxErrorKind::kTruncated, file_ + "." + field,
                     file_ + " file truncated while reading " + field);
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
  std::string file_;
};

std::vector<std::uint8_t> slurp(const std::filesystem::path& path,
                                const std::string& file) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IdxError(IdxErrorKind::kIo, file, "cannot open " + path.string());
  }
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

LabeledDataset parse_idx(std::span<const std::uint8_t> images,
                         std::span<const std::uint8_t> labels,
                         int num_classes) {
  Reader img(images, "images");
  Reader lab(labels, "labels");

  const std::uint32_t img_magic = img.u32("magic");
  if (img_magic != kIdxImagesMagic) {
    throw IdxError(IdxErrorKind::kMagicMismatch, "images.magic",
                   "images magic is not 0x00000803");
  }
  const std::uint32_t lab_magic = lab.u32("magic");
  if (lab_magic != kIdxLabelsMagic) {
    throw IdxError(IdxErrorKind::kMagicMismatch, "labels.magic",
                   "labels magic is not 0x00000801");
  }
  const std::uint32_t n_images = img.u32("count");
  const std::uint32_t rows = img.u32("rows");
  const std::uint32_t cols = img.u32("cols");
  const std::uint32_t n_labels = lab.u32("count");
  if (n_images != n_labels) {
    throw IdxError(IdxErrorKind::kCountMismatch, "labels.count",
                   "image count " + std::to_string(n_images) +
                       " differs from label count " + std::to_string(n_labels));
  }
  const std::size_t pixels = static_cast<std::size_t>(rows) * cols;
  auto pixel_bytes = img.take(pixels * n_images, "pixels");
  auto label_bytes = lab.take(n_labels, "values");

  std::vector<double> features(pixel_bytes.size());
  for (std::size_t i = 0; i < pixel_bytes.size(); ++i) {
    features[i] = pixel_bytes[i] / 255.0;
  }
  std::vector<int> ys(label_bytes.begin(), label_bytes.end());
  for (int y : ys) {
    if (y >= num_classes) {
      throw IdxError(IdxErrorKind::kBadLabel, "labels.values",
                     "label " + std::to_string(y) + " exceeds class count");
    }
  }
  return LabeledDataset(pixels, num_classes, std::move(features), std::move(ys));
}

LabeledDataset load_idx(const std::filesystem::path& images_path,
                        const std::filesystem::path& labels_path,
                        int num_classes) {
  const auto images = slurp(images_path, "images");
  const auto labels = slurp(labels_path, "labels");
  return parse_idx(images, labels, num_classes);
}

}  // namespace fedwelfare
