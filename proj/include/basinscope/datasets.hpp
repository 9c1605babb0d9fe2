// Copyright 2026 The basinscope Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "basinscope/mlp.hpp"

namespace basinscope {

enum class Role : std::uint8_t { train, test, poison };

std::string_view to_string(Role role);
Role parse_role(std::string_view name);

/// Two-dimensional points with binary labels.
struct LabeledDataset {
  Matrix points;  // N x 2
  std::vector<int> labels;
  Role role = Role::train;

  std::size_t size() const { return labels.size(); }
  Batch to_batch() const { return Batch{points, labels}; }
  void validate() const;

  friend bool operator==(const LabeledDataset&, const LabeledDataset&) = default;
};

/// Two interleaved spirals, one per class. Class c follows
/// (r cos(t + c*pi), r sin(t + c*pi)) with r = 0.2 + 0.8 t / (2 pi turns)
/// for t uniform on [0, 2 pi turns], plus isotropic Gaussian noise.
struct SwissRollSpec {
  std::size_t n_points = 800;
  double noise_sd = 0.04;
  double turns = 1.5;

  friend bool operator==(const SwissRollSpec&, const SwissRollSpec&) = default;
};

/// Four concentric circles with alternating labels, outermost first:
/// radii[0] class 0, radii[1] class 1, radii[2] class 0, radii[3] class 1.
/// The margin under study is the gap radii[1] - radii[2].
struct RingsSpec {
  std::size_t n_per_ring = 200;
  std::array<double, 4> radii{1.0, 0.7, 0.45, 0.2};
  double noise_sd = 0.01;

  double gap() const { return radii[1] - radii[2]; }
  /// Default radii with the inner class-1/class-0 gap set to `gap`.
  static RingsSpec with_gap(double gap);
  void validate() const;

  friend bool operator==(const RingsSpec&, const RingsSpec&) = default;
};

using GeneratorSpec = std::variant<SwissRollSpec, RingsSpec>;

LabeledDataset make_swissroll(std::size_t n_points, double noise_sd,
                              double turns, std::uint64_t seed);
LabeledDataset make_swissroll(const SwissRollSpec& spec, std::uint64_t seed);
LabeledDataset make_rings(const RingsSpec& spec, std::uint64_t seed);

/// Draws `n` points from a generator; for rings the points are spread as
/// evenly as possible over the four circles.
LabeledDataset generate(const GeneratorSpec& spec, std::size_t n,
                        std::uint64_t seed);
/// Total point count of the generator's native dataset.
std::size_t native_size(const GeneratorSpec& spec);

struct TrainTestSplit {
  LabeledDataset train;
  LabeledDataset test;
};

/// Stratified split: each class is shuffled independently and rounded to
/// `train_fraction`, so class counts stay within one point of balanced.
TrainTestSplit split(const LabeledDataset& ds, double train_fraction,
                     std::uint64_t seed);

/// Fresh, correctly labeled draws from the same process, tagged as poison.
LabeledDataset sample_poison_set(const GeneratorSpec& spec, std::size_t n_poison,
                                 std::uint64_t seed);

struct TrainingData {
  LabeledDataset train;
  LabeledDataset test;
  std::optional<LabeledDataset> poison;
};

/// Everything needed to regenerate a train/test/poison triple.
struct DatasetSpec {
  GeneratorSpec generator = SwissRollSpec{};
  double train_fraction = 0.5;
  std::size_t n_poison = 200;
  std::uint64_t seed = 0;

  friend bool operator==(const DatasetSpec&, const DatasetSpec&) = default;
};

/// Generates, splits, and draws the poison set. The poison seed is derived
/// from `spec.seed` and never coincides with the split stream.
TrainingData build_data(const DatasetSpec& spec);

}  // namespace basinscope
