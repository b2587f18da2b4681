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

#ifndef FEDWELFARE_DATA_H_
#define FEDWELFARE_DATA_H_

#include <vector>

#include "fedwelfare/common.h"
#include "fedwelfare/dataset.h"

namespace fedwelfare {

// One Poisson(lambda) draw of newly collected samples.
long sample_arrivals(double lambda, Rng& rng);

// Class centers shared by every client of a scenario.
struct SyntheticTask {
  int classes = 10;
  std::size_t features = 16;
  std::vector<double> centers;  // classes x features, row-major
};

// Centers are `separation` times a uniformly random unit direction.
SyntheticTask make_synthetic_task(int classes, std::size_t features,
                                  double separation, Rng& rng);

// Per-client distortion of the shared task.
struct SyntheticClient {
  std::vector<double> shift;  // additive mean shift, one entry per feature
  double scale = 1.0;
  double label_noise = 0.0;
};

// Mean-shift vector of length `magnitude` in a random direction.
std::vector<double> random_shift(std::size_t features, double magnitude,
                                 Rng& rng);

// Replaces `label` by a class drawn uniformly from the other classes.
int corrupt_label(int label, int classes, Rng& rng);

// Draws `n` labelled samples: y ~ U{0..C-1}, x = scale * (center_y + z) + shift
// with z ~ N(0, I); each label is then corrupted with probability
// label_noise. When `true_labels` is given it receives the uncorrupted labels.
LabeledDataset generate_synthetic_data(const SyntheticTask& task,
                                       const SyntheticClient& params, long n,
                                       Rng& rng,
                                       std::vector<int>* true_labels = nullptr);

// Draws `n` rows uniformly with replacement from `pool`, corrupting labels
// with probability `label_noise`.
LabeledDataset draw_from_pool(const LabeledDataset& pool, long n,
                              double label_noise, Rng& rng);

// Rows that go to validation when `n` samples arrive: ceil(0.3 n).
long validation_share(long n);

struct ArrivalSplit {
  LabeledDataset train;
  LabeledDataset validation;
};

// First n - validation_share(n) rows train, the rest validate.
ArrivalSplit split_arrivals(const LabeledDataset& batch);

}  // namespace fedwelfare

#endif  // FEDWELFARE_DATA_H_
