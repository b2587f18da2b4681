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

#include "fedwelfare/data.h"

#include <cmath>

namespace fedwelfare {

long sample_arrivals(double lambda, Rng& rng) {
  if (!(lambda > 0.0)) throw ValidationError("lambda must be positive");
  std::poisson_distribution<long> poisson(lambda);
  return poisson(rng);
}

std::vector<double> random_shift(std::size_t features, double magnitude,
                                 Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> dir(features);
  double norm = 0.0;
  for (double& d : dir) {
    d = normal(rng);
    norm += d * d;
  }
  norm = std::sqrt(norm);
  for (double& d : dir) d = norm > 0.0 ? magnitude * d / norm : 0.0;
  return dir;
}

SyntheticTask make_synthetic_task(int classes, std::size_t features,
                                  double separation, Rng& rng) {
  if (classes < 2 || features == 0) {
    throw ValidationError("task needs >= 2 classes and >= 1 feature");
  }
  SyntheticTask task{classes, features, {}};
  task.centers.reserve(static_cast<std::size_t>(classes) * features);
  for (int c = 0; c < classes; ++c) {
    std::vector<double> center = random_shift(features, separation, rng);
    task.centers.insert(task.centers.end(), center.begin(), center.end());
  }
  return task;
}

int corrupt_label(int label, int classes, Rng& rng) {
  std::uniform_int_distribution<int> other(0, classes - 2);
  const int pick = other(rng);
  return pick >= label ? pick + 1 : pick;
}

LabeledDataset generate_synthetic_data(const SyntheticTask& task,
                                       const SyntheticClient& params, long n,
                                       Rng& rng,
                                       std::vector<int>* true_labels) {
  if (n < 0) throw ValidationError("negative sample count");
  const std::size_t d = task.features;
  if (!params.shift.empty() && params.shift.size() != d) {
    throw StructuralError("shift vector has the wrong length");
  }
  LabeledDataset out(d, task.classes);
  std::uniform_int_distribution<int> label_dist(0, task.classes - 1);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> x(d);
  if (true_labels != nullptr) true_labels->clear();
  for (long i = 0; i < n; ++i) {
    const int y = label_dist(rng);
    const double* center = task.centers.data() + static_cast<std::size_t>(y) * d;
    for (std::size_t j = 0; j < d; ++j) {
      x[j] = params.scale * (center[j] + normal(rng)) +
             (params.shift.empty() ? 0.0 : params.shift[j]);
    }
    // Always consume the corruption draws so streams stay aligned across
    // clients with different noise rates.
    const bool corrupt = unit(rng) < params.label_noise;
    const int replacement = corrupt_label(y, task.classes, rng);
    out.append(x, corrupt ? replacement : y);
    if (true_labels != nullptr) true_labels->push_back(y);
  }
  return out;
}

LabeledDataset draw_from_pool(const LabeledDataset& pool, long n,
                              double label_noise, Rng& rng) {
  if (n < 0) throw ValidationError("negative sample count");
  if (pool.empty()) throw ValidationError("cannot draw from an empty pool");
  LabeledDataset out(pool.num_features(), pool.num_classes());
  std::uniform_int_distribution<std::size_t> pick(0, pool.rows() - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (long i = 0; i < n; ++i) {
    const std::size_t r = pick(rng);
    const bool corrupt = unit(rng) < label_noise;
    const int replacement = corrupt_label(pool.label(r), pool.num_classes(), rng);
    out.append(pool.row(r), corrupt ? replacement : pool.label(r));
  }
  return out;
}

long validation_share(long n) {
  if (n <= 0) return 0;
  // ceil(0.3 n) in integer arithmetic.
  return (3 * n + 9) / 10;
}

ArrivalSplit split_arrivals(const LabeledDataset& batch) {
  const auto n = static_cast<long>(batch.rows());
  const long train_rows = n - validation_share(n);
  ArrivalSplit split{LabeledDataset(batch.num_features(), batch.num_classes()),
                     LabeledDataset(batch.num_features(), batch.num_classes())};
  for (long i = 0; i < n; ++i) {
    const auto r = static_cast<std::size_t>(i);
    (i < train_rows ? split.train : split.validation)
        .append(batch.row(r), batch.label(r));
  }
  return split;
}

}  // namespace fedwelfare
