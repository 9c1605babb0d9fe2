// Copyright 2026 The basinscope Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "basinscope/datasets.hpp"
#include "basinscope/embed.hpp"
#include "basinscope/landscape.hpp"
#include "basinscope/optim.hpp"
#include "basinscope/report.hpp"

namespace basinscope {

/// The same train/test split with the poison set dropped.
TrainingData without_poison(TrainingData data);

/// Default swiss roll for a seed.
DatasetSpec swissroll_dataset(std::uint64_t seed);

/// Radii and volume around one minimizer, measured on the clean train loss.
struct BasinReport {
  std::vector<BasinSample> samples;
  SharpnessSummary sharpness;
  /// Absent when fewer than two directions were uncensored.
  std::optional<VolumeEstimate> volume;
  std::string volume_error;
};

/// Throws a precondition error when the clean train loss at `center` is not
/// below the cutoff.
BasinReport measure_basin(const MlpArch& arch, const ParamVector& center,
                          const LabeledDataset& train, const DirectionSet& directions,
                          const RadiusSearch& search, std::size_t workers = 0);

/// Trains clean (beta = 0) or poisoned from `init`.
TrainRun train_at_beta(const MlpArch& arch, const TrainingData& data,
                       TrainConfig config, double beta, const ParamVector& init);

struct SweepRow {
  double beta = 0.0;
  double train_acc = 0.0;
  double test_acc = 0.0;
  double train_loss = 0.0;
  /// NaN when the endpoint is not inside a clean-loss basin or every
  /// direction was censored.
  double mean_radius = 0.0;
  double log10_volume = 0.0;
  std::size_t num_censored = 0;
  std::string note;
};

/// One run per beta from the same initialization, then a basin measurement
/// at each endpoint.
std::vector<SweepRow> beta_sweep(const MlpArch& arch, const TrainingData& data,
                                 const TrainConfig& config,
                                 const std::vector<double>& betas,
                                 const DirectionSet& directions,
                                 const RadiusSearch& search, std::size_t workers = 0);

std::string sweep_csv(const std::vector<SweepRow>& rows);

struct RingsOutcome {
  RingsSpec spec;
  TrainRun run;
  Evaluation train;
  Evaluation test;
  ClassGrid grid;
  MarginEstimate margin;
};

/// Trains a clean net on rings with the given gap and measures its margin.
RingsOutcome rings_experiment(const MlpArch& arch, double gap, std::uint64_t seed,
                              const TrainConfig& config, const Domain& domain,
                              std::size_t resolution);

struct EmbeddingPlan {
  std::size_t bad_per_iterate = 3;
  /// Use every k-th checkpoint as a poison-search start.
  std::size_t iterate_stride = 1;
  PoisonSearch search;
  std::size_t pca_components = 50;
  TsneConfig tsne;
};

struct EmbeddingOutcome {
  std::vector<EmbeddingRow> rows;
  Matrix coordinates;  // rows x 2
  std::vector<double> explained;
  TsneResult tsne;
  std::size_t searches = 0;
  std::size_t searches_failed = 0;
};

/// SGD iterates from `run` (checkpoints only; the last one is tagged final),
/// bad minima searched from each selected iterate with seeds derived from
/// (seed, iterate, k), then PCA and t-SNE of all rows.
EmbeddingOutcome embed_trajectory(const MlpArch& arch, const TrainingData& data,
                                  const TrainRun& run, const EmbeddingPlan& plan,
                                  std::uint64_t seed, std::size_t workers = 0);

/// tag,source_epoch,x,y
std::string embedding_csv(const EmbeddingOutcome& outcome);

}  // namespace basinscope
