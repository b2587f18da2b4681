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

#ifndef FEDWELFARE_ACCURACY_ORACLE_H_
#define FEDWELFARE_ACCURACY_ORACLE_H_

#include "fedwelfare/common.h"

namespace fedwelfare {

// Synthetic learning curve standing in for real training:
//
//   acc = a_max * hetero * (1 - exp(-samples / tau)) + N(0, noise_sd^2)
//
// clamped to [0, 1]. `samples` is the federation-wide pool of effective
// samples, i.e. the running sum of quality * s(n, t) over active clients.
struct AccuracyOracleParams {
  double a_max = 0.9;
  double tau = 1000.0;
  double hetero = 1.0;
  double quality = 1.0;
  double noise_sd = 0.0;
};

void validate(const AccuracyOracleParams& params);

// Noise-free curve value, unclamped.
double oracle_curve(const AccuracyOracleParams& params, double samples);

// Curve plus a pre-drawn standard normal `z` scaled by noise_sd, clamped.
double oracle_accuracy(const AccuracyOracleParams& params, double samples,
                       double z);

// Draws one standard normal from `rng` (always, even when noise_sd is 0, so
// stream consumption does not depend on the noise level).
double oracle_accuracy(const AccuracyOracleParams& params, double samples,
                       Rng& rng);

// Expected accuracy measured against labels that were corrupted with
// probability `label_noise`, uniformly over the other classes.
double measured_accuracy(double accuracy, double label_noise, int classes);

}  // namespace fedwelfare

#endif  // FEDWELFARE_ACCURACY_ORACLE_H_
