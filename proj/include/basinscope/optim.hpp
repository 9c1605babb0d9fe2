// Copyright 2026 The basinscope Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "basinscope/datasets.hpp"
#include "basinscope/error.hpp"
#include "basinscope/mlp.hpp"
#include "basinscope/objective.hpp"
#include "basinscope/rng.hpp"

namespace basinscope {

enum class OptimizerKind { sgd, momentum, adam };

std::string_view to_string(OptimizerKind kind);
OptimizerKind parse_optimizer(std::string_view name);

struct TrainConfig {
  ObjectiveSpec objective;
  OptimizerKind optimizer = OptimizerKind::sgd;
  double learning_rate = 0.05;
  double momentum_coef = 0.9;
  std::size_t batch_size = 40;
  std::size_t epochs = 3000;
  std::size_t checkpoint_every = 10;
  std::uint64_t seed = 0;

  void validate() const;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

/// Per-coordinate optimizer memory: velocity for momentum, first and second
/// moments for Adam. Plain SGD keeps nothing.
struct OptimizerState {
  OptimizerKind kind = OptimizerKind::sgd;
  std::vector<double> first;
  std::vector<double> second;
  std::uint64_t steps = 0;

  static OptimizerState create(OptimizerKind kind, std::size_t size);
};

inline constexpr double kAdamBeta1 = 0.9;
inline constexpr double kAdamBeta2 = 0.999;
inline constexpr double kAdamEpsilon = 1e-8;

/// One update in place.
///   sgd:      theta -= lr * g
///   momentum: v = mu * v - lr * g; theta += v
///   adam:     bias-corrected moments with (0.9, 0.999, 1e-8)
/// A non-finite result throws a numeric error naming the coordinate.
void step(OptimizerState& state, ParamVector& params, const ParamVector& grad,
          const TrainConfig& config);

struct EpochMetrics {
  std::size_t epoch = 0;
  double train_loss = 0.0;  // clean cross-entropy on the whole train set
  double train_acc = 0.0;
  double test_acc = 0.0;

  friend bool operator==(const EpochMetrics&, const EpochMetrics&) = default;
};

struct TrajectoryPoint {
  std::size_t epoch = 0;
  ParamVector params;

  friend bool operator==(const TrajectoryPoint&, const TrajectoryPoint&) = default;
};

struct TrainRun {
  TrainConfig config;
  ParamVector initial;
  std::vector<TrajectoryPoint> checkpoints;
  std::vector<EpochMetrics> metrics;
  ParamVector final_params;

  friend bool operator==(const TrainRun&, const TrainRun&) = default;
};

/// Training produced a NaN/Inf. Carries the run up to the last good epoch.
class DivergenceError : public Error {
 public:
  DivergenceError(std::size_t epoch, const std::string& what, TrainRun partial);

  std::size_t epoch() const { return epoch_; }
  const TrainRun& partial() const { return partial_; }

 private:
  std::size_t epoch_;
  TrainRun partial_;
};

/// Epoch-at-a-time minibatch training.
///
/// Every epoch takes ceil(|train| / batch_size) steps. Under the clean
/// objective an epoch is one shuffled pass over the train set. Under the
/// poisoned objective each step draws round(beta * batch_size) poison points
/// and fills the rest with clean points, each side read from its own
/// reshuffled cyclic stream; the loss normalizers are the sub-batch sizes.
class Trainer {
 public:
  Trainer(const MlpArch& arch, const TrainingData& data, TrainConfig config,
          ParamVector initial);

  /// Runs one epoch and returns clean metrics for it. Throws numeric errors
  /// (without epoch context) on non-finite values.
  EpochMetrics run_epoch();

  const ParamVector& params() const { return params_; }
  std::size_t epoch() const { return epoch_; }
  std::size_t poison_per_batch() const { return poison_per_batch_; }

 private:
  std::size_t next_index(std::vector<std::size_t>& order, std::size_t& cursor);
  Batch gather(const LabeledDataset& ds, std::span<const std::size_t> idx) const;

  const MlpArch& arch_;
  const TrainingData& data_;
  TrainConfig config_;
  ParamVector params_;
  OptimizerState state_;
  Rng rng_;
  std::size_t epoch_ = 0;
  std::size_t poison_per_batch_ = 0;
  std::vector<std::size_t> clean_order_, poison_order_;
  std::size_t clean_cursor_ = 0, poison_cursor_ = 0;
};

/// Clean loss and accuracy on a dataset from a single forward pass.
struct Evaluation {
  double loss = 0.0;
  double accuracy = 0.0;
};
Evaluation evaluate(const MlpArch& arch, const ParamVector& params,
                    const LabeledDataset& ds);

/// Trains from init_params(arch, config.seed), or from `initial` when given.
/// Checkpoints are kept at every multiple of checkpoint_every and at the
/// final epoch. The poison set must be present iff the objective is poisoned.
TrainRun train(const MlpArch& arch, const TrainingData& data,
               const TrainConfig& config,
               std::optional<ParamVector> initial = std::nullopt);

struct StopSpec {
  double min_train_acc = 0.995;
  double max_test_acc = 0.60;
  std::size_t max_epochs = 3000;
  /// Extra requirement on the clean train loss; disabled by default.
  double max_train_loss = std::numeric_limits<double>::infinity();
};

struct PoisonSearch {
  double beta = 0.9;
  OptimizerKind optimizer = OptimizerKind::sgd;
  double learning_rate = 0.05;
  double momentum_coef = 0.9;
  std::size_t batch_size = 40;
  StopSpec stop;
};

struct BadMinimum {
  ParamVector params;
  EpochMetrics metrics;
  double distance_from_start = 0.0;
};

/// The poison search ran out of epochs. `best` is the epoch that came
/// closest to meeting both accuracy thresholds.
class NotFoundError : public Error {
 public:
  NotFoundError(const std::string& what, EpochMetrics best)
      : Error(ErrorKind::not_found, what), best_(best) {}
  const EpochMetrics& best() const { return best_; }

 private:
  EpochMetrics best_;
};

/// Minimizes the poisoned loss starting at `start` and returns the first
/// epoch's iterate that satisfies the stop thresholds.
BadMinimum find_bad_minimum(const MlpArch& arch, const ParamVector& start,
                            const TrainingData& data, const PoisonSearch& search,
                            std::uint64_t seed);

}  // namespace basinscope
