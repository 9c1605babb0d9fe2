// Copyright 2026 The basinscope Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "basinscope/datasets.hpp"
#include "basinscope/mlp.hpp"

namespace basinscope {

inline constexpr double kProbabilityFloor = 1e-300;

enum class ObjectiveKind { clean, poisoned };

/// Which loss to minimize. `beta` is the poison factor and only matters for
/// the poisoned kind.
struct ObjectiveSpec {
  ObjectiveKind kind = ObjectiveKind::clean;
  double beta = 0.0;

  static ObjectiveSpec clean() { return {}; }
  static ObjectiveSpec poisoned(double beta);

  void validate() const;
  double poison_weight() const {
    return kind == ObjectiveKind::poisoned ? beta : 0.0;
  }

  friend bool operator==(const ObjectiveSpec&, const ObjectiveSpec&) = default;
};

/// Mean of -log p(true class) over the batch.
double cross_entropy(const MlpArch& arch, const ParamVector& params,
                     const Batch& data);

/// (1 - beta) * CE(train) + beta * mean of -log(1 - p(true class)) on poison.
/// A term whose weight is zero is skipped, so beta = 0 reproduces
/// cross_entropy exactly and its poison batch may be empty.
double poisoned_loss(const MlpArch& arch, const ParamVector& params,
                     const Batch& train, const Batch& poison, double beta);

/// Fraction of points whose argmax class equals the label. Ties go to the
/// lower class index.
double accuracy(const MlpArch& arch, const ParamVector& params,
                const LabeledDataset& ds);
double accuracy(const MlpArch& arch, const ParamVector& params,
                const Batch& data);

std::vector<int> predict(const MlpArch& arch, const ParamVector& params,
                         const Matrix& inputs);
int argmax_class(std::span<const double> probabilities);

// Building blocks shared with loss_grad so both produce identical values.
double sum_nll(const Matrix& probs, std::span<const int> labels);
double sum_reverse_nll(const Matrix& probs, std::span<const int> labels);
double nll_term(std::span<const double> probs, int label);
double reverse_nll_term(std::span<const double> probs, int label);
double combine_poisoned(double clean_term, double poison_term, double beta);

}  // namespace basinscope
