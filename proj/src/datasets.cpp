// Copyright 2026 The basinscope Authors
// SPDX-License-Identifier: Apache-2.0

#include "basinscope/datasets.hpp"

#include <cmath>
#include <numbers>

#include "basinscope/error.hpp"
#include "basinscope/rng.hpp"

namespace basinscope {

std::string_view to_string(Role role) {
  switch (role) {
    case Role::train: return "train";
    case Role::test: return "test";
    case Role::poison: return "poison";
  }
  return "?";
}

Role parse_role(std::string_view name) {
  if (name == "train") return Role::train;
  if (name == "test") return Role::test;
  if (name == "poison") return Role::poison;
  throw invalid_argument("unknown dataset role '" + std::string(name) + "'");
}

void LabeledDataset::validate() const {
  if (labels.empty()) throw precondition_failed("dataset is empty");
  if (points.rows() != labels.size() || points.cols() != 2) {
    throw invalid_argument("dataset must be an N x 2 matrix with N labels");
  }
  for (int label : labels) {
    if (label != 0 && label != 1) throw invalid_argument("labels must be 0 or 1");
  }
  check_finite(points.flat(), "dataset coordinate");
}

RingsSpec RingsSpec::with_gap(double gap) {
  RingsSpec spec;
  spec.radii[2] = spec.radii[1] - gap;
  spec.validate();
  return spec;
}

void RingsSpec::validate() const {
  if (n_per_ring == 0) throw invalid_argument("rings need at least one point each");
  if (!(noise_sd >= 0.0)) throw invalid_argument("noise_sd must be >= 0");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0) || !std::isfinite(radii[i])) {
      throw invalid_argument("ring radii must be positive and finite");
    }
    if (i > 0 && !(radii[i] < radii[i - 1])) {
      throw invalid_argument("ring radii must be strictly decreasing");
    }
  }
}

namespace {

LabeledDataset swissroll_points(std::size_t n, double noise_sd, double turns,
                                Rng& rng) {
  LabeledDataset ds;
  ds.points = Matrix(n, 2);
  ds.labels.resize(n);
  const double span = 2.0 * std::numbers::pi * turns;
  for (std::size_t i = 0; i < n; ++i) {
    const int label = static_cast<int>(i % 2);
    const double t = rng.uniform(0.0, span);
    const double r = 0.2 + 0.8 * t / span;
    const double phase = t + label * std::numbers::pi;
    const double nx = rng.normal();
    const double ny = rng.normal();
    ds.points(i, 0) = r * std::cos(phase) + noise_sd * nx;
    ds.points(i, 1) = r * std::sin(phase) + noise_sd * ny;
    ds.labels[i] = label;
  }
  return ds;
}

LabeledDataset ring_points(const RingsSpec& spec, std::size_t n, Rng& rng) {
  LabeledDataset ds;
  ds.points = Matrix(n, 2);
  ds.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t ring = i % 4;
    const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double nx = rng.normal();
    const double ny = rng.normal();
    ds.points(i, 0) = spec.radii[ring] * std::cos(angle) + spec.noise_sd * nx;
    ds.points(i, 1) = spec.radii[ring] * std::sin(angle) + spec.noise_sd * ny;
    ds.labels[i] = static_cast<int>(ring % 2);
  }
  return ds;
}

void validate_swissroll(double noise_sd, double turns) {
  if (!(noise_sd >= 0.0)) throw invalid_argument("noise_sd must be >= 0");
  if (!(turns > 0.0) || !std::isfinite(turns)) {
    throw invalid_argument("turns must be positive");
  }
}

LabeledDataset subset(const LabeledDataset& ds, const std::vector<std::size_t>& idx,
                      Role role) {
  LabeledDataset out;
  out.points = Matrix(idx.size(), ds.points.cols());
  out.labels.resize(idx.size());
  out.role = role;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    for (std::size_t c = 0; c < ds.points.cols(); ++c) out.points(k, c) = ds.points(idx[k], c);
    out.labels[k] = ds.labels[idx[k]];
  }
  return out;
}

}  // namespace

LabeledDataset make_swissroll(std::size_t n_points, double noise_sd, double turns,
                              std::uint64_t seed) {
  if (n_points < 2 || n_points % 2 != 0) {
    throw invalid_argument("swiss roll needs an even number of points (>= 2), got " +
                           std::to_string(n_points));
  }
  validate_swissroll(noise_sd, turns);
  Rng rng(seed);
  return swissroll_points(n_points, noise_sd, turns, rng);
}

LabeledDataset make_swissroll(const SwissRollSpec& spec, std::uint64_t seed) {
  return make_swissroll(spec.n_points, spec.noise_sd, spec.turns, seed);
}

LabeledDataset make_rings(const RingsSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng(seed);
  return ring_points(spec, 4 * spec.n_per_ring, rng);
}

LabeledDataset generate(const GeneratorSpec& spec, std::size_t n,
                        std::uint64_t seed) {
  if (n == 0) throw invalid_argument("cannot generate an empty dataset");
  Rng rng(seed);
  if (const auto* roll = std::get_if<SwissRollSpec>(&spec)) {
    validate_swissroll(roll->noise_sd, roll->turns);
    return swissroll_points(n, roll->noise_sd, roll->turns, rng);
  }
  const auto& rings = std::get<RingsSpec>(spec);
  rings.validate();
  return ring_points(rings, n, rng);
}

std::size_t native_size(const GeneratorSpec& spec) {
  if (const auto* roll = std::get_if<SwissRollSpec>(&spec)) return roll->n_points;
  return 4 * std::get<RingsSpec>(spec).n_per_ring;
}

TrainTestSplit split(const LabeledDataset& ds, double train_fraction,
                     std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw invalid_argument("train fraction must lie in (0, 1)");
  }
  ds.validate();
  Rng rng(seed);
  std::vector<std::size_t> train_idx, test_idx;
  for (int label : {0, 1}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < ds.size(); ++i) {
      if (ds.labels[i] == label) members.push_back(i);
    }
    shuffle(members, rng);
    const auto n_train = static_cast<std::size_t>(
        std::llround(train_fraction * static_cast<double>(members.size())));
    train_idx.insert(train_idx.end(), members.begin(), members.begin() + n_train);
    test_idx.insert(test_idx.end(), members.begin() + n_train, members.end());
  }
  if (train_idx.empty() || test_idx.empty()) {
    throw invalid_argument("train fraction leaves one side of the split empty");
  }
  shuffle(train_idx, rng);
  shuffle(test_idx, rng);
  return {subset(ds, train_idx, Role::train), subset(ds, test_idx, Role::test)};
}

LabeledDataset sample_poison_set(const GeneratorSpec& spec, std::size_t n_poison,
                                 std::uint64_t seed) {
  if (n_poison == 0) throw invalid_argument("poison set needs at least one point");
  LabeledDataset ds = generate(spec, n_poison, seed);
  ds.role = Role::poison;
  return ds;
}

TrainingData build_data(const DatasetSpec& spec) {
  const LabeledDataset full =
      generate(spec.generator, native_size(spec.generator), derive_seed(spec.seed, 0));
  TrainTestSplit parts = split(full, spec.train_fraction, derive_seed(spec.seed, 1));
  TrainingData data{std::move(parts.train), std::move(parts.test), std::nullopt};
  if (spec.n_poison > 0) {
    data.poison =
        sample_poison_set(spec.generator, spec.n_poison, derive_seed(spec.seed, 2));
  }
  return data;
}

}  // namespace basinscope
