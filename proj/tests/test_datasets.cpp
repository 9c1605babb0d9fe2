// Copyright 2026 The basinscope Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <utility>

#include "basinscope/datasets.hpp"
#include "basinscope/error.hpp"

using namespace basinscope;

namespace {

double min_cross_class_distance(const LabeledDataset& ds) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (std::size_t j = i + 1; j < ds.size(); ++j) {
      if (ds.labels[i] == ds.labels[j]) continue;
      best = std::min(best, std::hypot(ds.points(i, 0) - ds.points(j, 0),
                                       ds.points(i, 1) - ds.points(j, 1)));
    }
  }
  return best;
}

std::size_t count_label(const LabeledDataset& ds, int label) {
  return static_cast<std::size_t>(std::count(ds.labels.begin(), ds.labels.end(), label));
}

std::set<std::pair<double, double>> point_set(const LabeledDataset& ds) {
  std::set<std::pair<double, double>> out;
  for (std::size_t i = 0; i < ds.size(); ++i) out.emplace(ds.points(i, 0), ds.points(i, 1));
  return out;
}

// Whether a noiseless point lies on spiral `label`, by inverting the radius.
bool on_spiral(double x, double y, int label, double turns) {
  const double span = 2.0 * std::numbers::pi * turns;
  const double r = std::hypot(x, y);
  const double t = (r - 0.2) / 0.8 * span;
  const double phase = t + label * std::numbers::pi;
  return std::abs(x - r * std::cos(phase)) < 1e-9 && std::abs(y - r * std::sin(phase)) < 1e-9;
}

}  // namespace

TEST_CASE("swiss roll is deterministic and balanced") {
  const LabeledDataset a = make_swissroll(800, 0.04, 1.5, 3);
  const LabeledDataset b = make_swissroll(800, 0.04, 1.5, 3);
  CHECK(a == b);
  CHECK_FALSE(a == make_swissroll(800, 0.04, 1.5, 4));
  CHECK(a.size() == 800);
  CHECK(count_label(a, 0) == 400);
  CHECK(count_label(a, 1) == 400);
  a.validate();
}

TEST_CASE("swiss roll rejects odd and tiny sizes") {
  CHECK_THROWS_AS(make_swissroll(801, 0.04, 1.5, 0), Error);
  CHECK_THROWS_AS(make_swissroll(0, 0.04, 1.5, 0), Error);
  CHECK_THROWS_AS(make_swissroll(10, -1.0, 1.5, 0), Error);
  CHECK_THROWS_AS(make_swissroll(10, 0.0, 0.0, 0), Error);
}

TEST_CASE("noiseless spirals are disjoint and each point is on its own arm") {
  const LabeledDataset ds = make_swissroll(400, 0.0, 1.5, 11);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const int label = ds.labels[i];
    CHECK(on_spiral(ds.points(i, 0), ds.points(i, 1), label, 1.5));
    CHECK_FALSE(on_spiral(ds.points(i, 0), ds.points(i, 1), 1 - label, 1.5));
  }
  // The two arms never come closer than a fixed positive distance.
  CHECK(min_cross_class_distance(ds) > 0.05);
}

TEST_CASE("rings at zero noise sit exactly on their radius") {
  RingsSpec spec;
  spec.noise_sd = 0.0;
  spec.n_per_ring = 50;
  const LabeledDataset ds = make_rings(spec, 5);
  CHECK(ds.size() == 200);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const double r = std::hypot(ds.points(i, 0), ds.points(i, 1));
    const std::size_t ring = i % 4;
    CHECK(std::abs(r - spec.radii[ring]) <= 1e-12);
    CHECK(ds.labels[i] == static_cast<int>(ring % 2));
  }
}

TEST_CASE("pinched rings are much closer than wide ones") {
  // Gaps of 0.5 and 0.02 times the outer radius, other gaps kept wide.
  RingsSpec wide, pinched;
  wide.radii = {1.0, 0.78, 0.28, 0.05};
  pinched.radii = {1.0, 0.7, 0.68, 0.2};
  wide.noise_sd = pinched.noise_sd = 0.0;
  CHECK(RingsSpec::with_gap(0.03).gap() == doctest::Approx(0.03));
  CHECK(wide.gap() == doctest::Approx(0.5));
  CHECK(pinched.gap() == doctest::Approx(0.02));
  const double dw = min_cross_class_distance(make_rings(wide, 1));
  const double dp = min_cross_class_distance(make_rings(pinched, 1));
  CHECK(dp >= 0.02 - 1e-12);
  CHECK(dp < 0.021);
  CHECK(dw >= 0.22 - 1e-12);
  CHECK(dw / dp > 10.0);
}

TEST_CASE("ring spec validation") {
  CHECK_THROWS_AS(RingsSpec::with_gap(0.9), Error);
  CHECK_THROWS_AS(RingsSpec::with_gap(-0.1), Error);
  RingsSpec spec;
  spec.radii = {1.0, 1.0, 0.5, 0.2};
  CHECK_THROWS_AS(spec.validate(), Error);
}

TEST_CASE("stratified split partitions the data") {
  const LabeledDataset ds = make_swissroll(800, 0.04, 1.5, 2);
  const TrainTestSplit parts = split(ds, 0.5, 9);
  CHECK(parts.train.size() == 400);
  CHECK(parts.test.size() == 400);
  CHECK(count_label(parts.train, 0) == 200);
  CHECK(count_label(parts.test, 1) == 200);
  CHECK(parts.train.role == Role::train);
  CHECK(parts.test.role == Role::test);

  const auto all = point_set(ds);
  const auto tr = point_set(parts.train);
  const auto te = point_set(parts.test);
  CHECK(tr.size() + te.size() == all.size());
  for (const auto& p : tr) {
    CHECK(all.count(p) == 1);
    CHECK(te.count(p) == 0);
  }

  const TrainTestSplit again = split(ds, 0.5, 9);
  CHECK(again.train == parts.train);
  CHECK_THROWS_AS(split(ds, 1.0, 0), Error);
  CHECK_THROWS_AS(split(ds, 0.0, 0), Error);

  const TrainTestSplit uneven = split(ds, 0.3, 1);
  CHECK(uneven.train.size() == 240);
  CHECK(uneven.test.size() == 560);
}

TEST_CASE("build_data draws a fresh poison set") {
  DatasetSpec spec;
  spec.seed = 4;
  const TrainingData data = build_data(spec);
  REQUIRE(data.poison.has_value());
  CHECK(data.poison->size() == 200);
  CHECK(data.poison->role == Role::poison);
  CHECK(data.train.size() == 400);
  CHECK(data.test.size() == 400);
  const auto tr = point_set(data.train);
  const auto te = point_set(data.test);
  for (const auto& p : point_set(*data.poison)) {
    CHECK(tr.count(p) == 0);
    CHECK(te.count(p) == 0);
  }
  CHECK(build_data(spec).poison == data.poison);

  spec.n_poison = 0;
  CHECK_FALSE(build_data(spec).poison.has_value());
}

TEST_CASE("poison labels are correct for their spiral") {
  SwissRollSpec roll;
  roll.noise_sd = 0.0;
  const LabeledDataset poison = sample_poison_set(roll, 150, 8);
  CHECK(poison.size() == 150);
  for (std::size_t i = 0; i < poison.size(); ++i) {
    CHECK(on_spiral(poison.points(i, 0), poison.points(i, 1), poison.labels[i], roll.turns));
  }
  CHECK_THROWS_AS(sample_poison_set(roll, 0, 8), Error);
}

TEST_CASE("role names round trip") {
  for (Role r : {Role::train, Role::test, Role::poison}) CHECK(parse_role(to_string(r)) == r);
  CHECK_THROWS_AS(parse_role("holdout"), Error);
}

TEST_CASE("dataset validation") {
  LabeledDataset ds = make_swissroll(10, 0.0, 1.5, 0);
  ds.labels[0] = 2;
  CHECK_THROWS_AS(ds.validate(), Error);
  ds.labels[0] = 0;
  ds.points(3, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(ds.validate(), Error);
  CHECK_THROWS_AS(LabeledDataset{}.validate(), Error);
}
