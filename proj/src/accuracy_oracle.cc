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

#include "fedwelfare/accuracy_oracle.h"

#include <algorithm>
#include <cmath>

namespace fedwelfare {

void validate(const AccuracyOracleParams& p) {
  if (!(p.a_max > 0.0 && p.a_max <= 1.0)) {
    throw ConfigError("oracle a_max must be in (0, 1]");
  }
  if (!(p.tau > 0.0)) throw ConfigError("oracle tau must be positive");
  if (!(p.hetero > 0.0 && p.hetero <= 1.0)) {
    throw ConfigError("oracle hetero must be in (0, 1]");
  }
  if (!(p.quality >= 0.0 && p.quality <= 1.0)) {
    throw ConfigError("oracle quality must be in [0, 1]");
  }
  if (!(p.noise_sd >= 0.0)) throw ConfigError("oracle noise_sd must be >= 0");
}

double oracle_curve(const AccuracyOracleParams& p, double samples) {
  if (!(samples >= 0.0)) throw ValidationError("negative effective samples");
  return p.a_max * p.hetero * -std::expm1(-samples / p.tau);
}

double oracle_accuracy(const AccuracyOracleParams& p, double samples,
                       double z) {
  return std::clamp(oracle_curve(p, samples) + p.noise_sd * z, 0.0, 1.0);
}

double oracle_accuracy(const AccuracyOracleParams& p, double samples,
                       Rng& rng) {
  std::normal_distribution<double> standard(0.0, 1.0);
  return oracle_accuracy(p, samples, standard(rng));
}

double measured_accuracy(double accuracy, double label_noise, int classes) {
  return accuracy * (1.0 - label_noise) +
         (1.0 - accuracy) * label_noise / (classes - 1.0);
}

}  // namespace fedwelfare
