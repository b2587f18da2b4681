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

#include "fedwelfare/model.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace fedwelfare {
namespace {

struct Views {
  std::span<const double> shift, scale, weight, bias;
  std::size_t features;
  int classes;
};

Views views_of(const ParamVector& model) {
  Views v{model.layer(layers::kNormShift), model.layer(layers::kNormScale),
          model.layer(layers::kDenseWeight), model.layer(layers::kDenseBias),
          0, 0};
  v.features = v.shift.size();
  v.classes = static_cast<int>(v.bias.size());
  return v;
}

void check_compatible(const ParamVector& model, const LabeledDataset& data) {
  if (!(model.layout() ==
        classifier_layout(data.num_features(), data.num_classes()))) {
    throw StructuralError("model layout does not fit the dataset dimensions");
  }
}

std::vector<std::size_t> all_rows(const LabeledDataset& data) {
  std::vector<std::size_t> rows(data.rows());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return rows;
}

// Normalized input and softmax probabilities for one row.
void forward(const Views& v, std::span<const double> x, std::vector<double>& z,
             std::vector<double>& prob) {
  z.resize(v.features);
  for (std::size_t j = 0; j < v.features; ++j) {
    z[j] = (x[j] - v.shift[j]) * v.scale[j];
  }
  prob.resize(static_cast<std::size_t>(v.classes));
  double max_logit = -INFINITY;
  for (int c = 0; c < v.classes; ++c) {
    const double* w = v.weight.data() + static_cast<std::size_t>(c) * v.features;
    double logit = v.bias[static_cast<std::size_t>(c)];
    for (std::size_t j = 0; j < v.features; ++j) logit += w[j] * z[j];
    prob[static_cast<std::size_t>(c)] = logit;
    max_logit = std::max(max_logit, logit);
  }
  double total = 0.0;
  for (double& p : prob) {
    p = std::exp(p - max_logit);
    total += p;
  }
  for (double& p : prob) p /= total;
}

void accumulate_gradient(const Views& v, const LabeledDataset& data,
                         std::span<const std::size_t> rows,
                         std::span<double> grad_weight,
                         std::span<double> grad_bias) {
  std::fill(grad_weight.begin(), grad_weight.end(), 0.0);
  std::fill(grad_bias.begin(), grad_bias.end(), 0.0);
  std::vector<double> z, prob;
  for (std::size_t r : rows) {
    forward(v, data.row(r), z, prob);
    prob[static_cast<std::size_t>(data.label(r))] -= 1.0;
    for (int c = 0; c < v.classes; ++c) {
      const double err = prob[static_cast<std::size_t>(c)];
      double* g = grad_weight.data() + static_cast<std::size_t>(c) * v.features;
      for (std::size_t j = 0; j < v.features; ++j) g[j] += err * z[j];
      grad_bias[static_cast<std::size_t>(c)] += err;
    }
  }
  const double inv = 1.0 / static_cast<double>(rows.size());
  for (double& g : grad_weight) g *= inv;
  for (double& g : grad_bias) g *= inv;
}

void refresh_normalization(ParamVector& model, const LabeledDataset& data,
                           double momentum) {
  if (momentum == 0.0) return;
  const std::size_t d = data.num_features();
  std::vector<double> mean(d, 0.0), var(d, 0.0);
  for (std::size_t r = 0; r < data.rows(); ++r) {
    auto x = data.row(r);
    for (std::size_t j = 0; j < d; ++j) mean[j] += x[j];
  }
  for (double& m : mean) m /= static_cast<double>(data.rows());
  for (std::size_t r = 0; r < data.rows(); ++r) {
    auto x = data.row(r);
    for (std::size_t j = 0; j < d; ++j) {
      var[j] += (x[j] - mean[j]) * (x[j] - mean[j]);
    }
  }
  auto shift = model.layer(layers::kNormShift);
  auto scale = model.layer(layers::kNormScale);
  for (std::size_t j = 0; j < d; ++j) {
    var[j] /= static_cast<double>(data.rows());
    const double target_scale = 1.0 / std::sqrt(var[j] + kNormVarianceFloor);
    shift[j] = (1.0 - momentum) * shift[j] + momentum * mean[j];
    scale[j] = (1.0 - momentum) * scale[j] + momentum * target_scale;
  }
}

}  // namespace

ParamLayout classifier_layout(std::size_t num_features, int num_classes) {
  const std::size_t d = num_features;
  const auto c = static_cast<std::size_t>(num_classes);
  return ParamLayout({
      {layers::kNormShift, 0, d, Partition::kLocal},
      {layers::kNormScale, d, d, Partition::kLocal},
      {layers::kDenseWeight, 2 * d, c * d, Partition::kShared},
      {layers::kDenseBias, 2 * d + c * d, c, Partition::kShared},
  });
}

ParamVector init_classifier(std::size_t num_features, int num_classes,
                            Rng& rng) {
  ParamVector model(classifier_layout(num_features, num_classes));
  auto scale = model.layer(layers::kNormScale);
  std::fill(scale.begin(), scale.end(), 1.0);
  std::normal_distribution<double> normal(0.0, 0.01);
  for (double& w : model.layer(layers::kDenseWeight)) w = normal(rng);
  return model;
}

double cross_entropy(const ParamVector& model, const LabeledDataset& data,
                     std::span<const std::size_t> rows) {
  check_compatible(model, data);
  std::vector<std::size_t> owned;
  if (rows.empty()) {
    owned = all_rows(data);
    rows = owned;
  }
  if (rows.empty()) throw ValidationError("cross-entropy of an empty dataset");
  const Views v = views_of(model);
  std::vector<double> z, prob;
  double loss = 0.0;
  for (std::size_t r : rows) {
    forward(v, data.row(r), z, prob);
    loss -= std::log(prob[static_cast<std::size_t>(data.label(r))]);
  }
  return loss / static_cast<double>(rows.size());
}

ParamVector cross_entropy_gradient(const ParamVector& model,
                                   const LabeledDataset& data,
                                   std::span<const std::size_t> rows) {
  check_compatible(model, data);
  std::vector<std::size_t> owned;
  if (rows.empty()) {
    owned = all_rows(data);
    rows = owned;
  }
  if (rows.empty()) throw ValidationError("gradient of an empty dataset");
  ParamVector grad(model.layout());
  accumulate_gradient(views_of(model), data, rows,
                      grad.layer(layers::kDenseWeight),
                      grad.layer(layers::kDenseBias));
  return grad;
}

void class_scores(const ParamVector& model, std::span<const double> x,
                  std::span<double> scores) {
  const Views v = views_of(model);
  for (int c = 0; c < v.classes; ++c) {
    const double* w = v.weight.data() + static_cast<std::size_t>(c) * v.features;
    double s = v.bias[static_cast<std::size_t>(c)];
    for (std::size_t j = 0; j < v.features; ++j) {
      s += w[j] * (x[j] - v.shift[j]) * v.scale[j];
    }
    scores[static_cast<std::size_t>(c)] = s;
  }
}

LocalUpdateResult local_update(const ParamVector& model,
                               const LabeledDataset& data,
                               const TrainerConfig& cfg, Rng& rng) {
  if (data.empty()) return {model, 0};
  check_compatible(model, data);
  if (cfg.epochs < 1 || cfg.batch_size < 1 || !(cfg.learning_rate >= 0.0)) {
    throw ConfigError("trainer needs epochs >= 1, batch >= 1, lr >= 0");
  }
  LocalUpdateResult out{model, 0};
  refresh_normalization(out.model, data, cfg.norm_momentum);

  std::vector<std::size_t> order = all_rows(data);
  const auto& layout = out.model.layout();
  std::vector<double> grad_weight(layout.find(layers::kDenseWeight).size);
  std::vector<double> grad_bias(layout.find(layers::kDenseBias).size);
  const auto batch = static_cast<std::size_t>(cfg.batch_size);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t len = std::min(batch, order.size() - start);
      accumulate_gradient(views_of(out.model), data,
                          std::span<const std::size_t>(order).subspan(start, len),
                          grad_weight, grad_bias);
      auto weight = out.model.layer(layers::kDenseWeight);
      auto bias = out.model.layer(layers::kDenseBias);
      for (std::size_t i = 0; i < weight.size(); ++i) {
        weight[i] -= cfg.learning_rate * grad_weight[i];
      }
      for (std::size_t i = 0; i < bias.size(); ++i) {
        bias[i] -= cfg.learning_rate * grad_bias[i];
      }
      ++out.iterations;
    }
  }
  return out;
}

double evaluate_accuracy(const ParamVector& model, const LabeledDataset& data) {
  if (data.empty()) throw ValidationError("accuracy of an empty dataset");
  check_compatible(model, data);
  std::vector<double> scores(static_cast<std::size_t>(data.num_classes()));
  std::size_t correct = 0;
  for (std::size_t r = 0; r < data.rows(); ++r) {
    class_scores(model, data.row(r), scores);
    int best = 0;
    for (int c = 1; c < data.num_classes(); ++c) {
      if (scores[static_cast<std::size_t>(c)] >
          scores[static_cast<std::size_t>(best)]) {
        best = c;
      }
    }
    correct += best == data.label(r) ? 1 : 0;
  }
  return static_cast<double>(correct) / static_cast<double>(data.rows());
}

}  // namespace fedwelfare
