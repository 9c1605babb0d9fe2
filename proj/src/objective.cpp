// Copyright 2026 The basinscope Authors
// SPDX-License-Identifier: Apache-2.0

#include "basinscope/objective.hpp"

#include <algorithm>
#include <cmath>

#include "basinscope/error.hpp"

namespace basinscope {

ObjectiveSpec ObjectiveSpec::poisoned(double beta) {
  ObjectiveSpec spec{ObjectiveKind::poisoned, beta};
  spec.validate();
  return spec;
}

void ObjectiveSpec::validate() const {
  if (kind == ObjectiveKind::poisoned && !(beta >= 0.0 && beta <= 1.0)) {
    throw invalid_argument("poison factor beta must lie in [0, 1], got " +
                           std::to_string(beta));
  }
}

double nll_term(std::span<const double> probs, int label) {
  return -std::log(std::max(probs[static_cast<std::size_t>(label)],
                            kProbabilityFloor));
}

// 1 - p_y is summed from the other classes; subtracting from one would lose
// every digit once p_y rounds to 1.
double reverse_nll_term(std::span<const double> probs, int label) {
  double rest = 0.0;
  for (std::size_t c = 0; c < probs.size(); ++c) {
    if (static_cast<int>(c) != label) rest += probs[c];
  }
  return -std::log(std::max(rest, kProbabilityFloor));
}

double sum_nll(const Matrix& probs, std::span<const int> labels) {
  double sum = 0.0;
  for (std::size_t s = 0; s < labels.size(); ++s) sum += nll_term(probs.row(s), labels[s]);
  return sum;
}

double sum_reverse_nll(const Matrix& probs, std::span<const int> labels) {
  double sum = 0.0;
  for (std::size_t s = 0; s < labels.size(); ++s) {
    sum += reverse_nll_term(probs.row(s), labels[s]);
  }
  return sum;
}

double combine_poisoned(double clean_term, double poison_term, double beta) {
  double value = 0.0;
  if (beta < 1.0) value += (1.0 - beta) * clean_term;
  if (beta > 0.0) value += beta * poison_term;
  return value;
}

double cross_entropy(const MlpArch& arch, const ParamVector& params,
                     const Batch& data) {
  data.validate(arch);
  const Matrix probs = forward(arch, params, data.inputs);
  return sum_nll(probs, data.labels) / static_cast<double>(data.size());
}

double poisoned_loss(const MlpArch& arch, const ParamVector& params,
                     const Batch& train, const Batch& poison, double beta) {
  if (!(beta >= 0.0 && beta <= 1.0)) {
    throw invalid_argument("poison factor beta must lie in [0, 1], got " +
                           std::to_string(beta));
  }
  double clean_term = 0.0;
  double poison_term = 0.0;
  if (beta < 1.0) clean_term = cross_entropy(arch, params, train);
  if (beta > 0.0) {
    poison.validate(arch);
    const Matrix probs = forward(arch, params, poison.inputs);
    poison_term = sum_reverse_nll(probs, poison.labels) /
                  static_cast<double>(poison.size());
  }
  return combine_poisoned(clean_term, poison_term, beta);
}

int argmax_class(std::span<const double> probabilities) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < probabilities.size(); ++c) {
    if (probabilities[c] > probabilities[best]) best = c;
  }
  return static_cast<int>(best);
}

std::vector<int> predict(const MlpArch& arch, const ParamVector& params,
                         const Matrix& inputs) {
  const Matrix probs = forward(arch, params, inputs);
  std::vector<int> classes(probs.rows());
  for (std::size_t s = 0; s < probs.rows(); ++s) classes[s] = argmax_class(probs.row(s));
  return classes;
}

double accuracy(const MlpArch& arch, const ParamVector& params,
                const Batch& data) {
  data.validate(arch);
  const std::vector<int> predicted = predict(arch, params, data.inputs);
  std::size_t correct = 0;
  for (std::size_t s = 0; s < predicted.size(); ++s) {
    if (predicted[s] == data.labels[s]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(predicted.size());
}

double accuracy(const MlpArch& arch, const ParamVector& params,
                const LabeledDataset& ds) {
  if (ds.size() == 0) throw precondition_failed("accuracy of an empty dataset");
  return accuracy(arch, params, ds.to_batch());
}

}  // namespace basinscope
