// Copyright 2026 The basinscope Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace basinscope {

struct ObjectiveSpec;

enum class Activation : std::uint8_t { tanh = 0, relu = 1 };

std::string_view to_string(Activation activation);
Activation parse_activation(std::string_view name);

/// Shape of a dense feed-forward classifier. Hidden layers share one
/// activation; the last layer feeds a softmax.
///
/// Parameters are laid out layer by layer: the weight matrix in
/// output-neuron-major order (row o holds the incoming weights of neuron o),
/// followed by that layer's biases.
class MlpArch {
 public:
  MlpArch(std::vector<std::size_t> widths, Activation activation);

  /// Six weight layers, 16-wide tanh hidden layers, two classes.
  static MlpArch swissroll_default();

  std::span<const std::size_t> widths() const { return widths_; }
  Activation activation() const { return activation_; }

  /// Number of weight layers (one less than the number of widths).
  std::size_t layer_count() const { return widths_.size() - 1; }
  std::size_t input_dim() const { return widths_.front(); }
  std::size_t class_count() const { return widths_.back(); }
  std::size_t param_count() const { return offsets_.back(); }

  std::size_t fan_in(std::size_t layer) const { return widths_[layer]; }
  std::size_t fan_out(std::size_t layer) const { return widths_[layer + 1]; }
  std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }
  std::size_t bias_offset(std::size_t layer) const {
    return offsets_[layer] + fan_in(layer) * fan_out(layer);
  }

  std::string describe() const;

  friend bool operator==(const MlpArch& a, const MlpArch& b) {
    return a.widths_ == b.widths_ && a.activation_ == b.activation_;
  }

 private:
  std::vector<std::size_t> widths_;
  Activation activation_;
  std::vector<std::size_t> offsets_;  // start of each layer, plus total
};

/// Flat parameter vector in the MlpArch layout.
class ParamVector {
 public:
  ParamVector() = default;
  explicit ParamVector(std::size_t size, double fill = 0.0)
      : values_(size, fill) {}
  explicit ParamVector(std::vector<double> values)
      : values_(std::move(values)) {}
  ParamVector(std::initializer_list<double> values) : values_(values) {}

  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  std::span<double> span() { return values_; }
  std::span<const double> span() const { return values_; }
  const std::vector<double>& values() const { return values_; }

  auto begin() { return values_.begin(); }
  auto end() { return values_.end(); }
  auto begin() const { return values_.begin(); }
  auto end() const { return values_.end(); }

  friend bool operator==(const ParamVector&, const ParamVector&) = default;

 private:
  std::vector<double> values_;
};

double l2_norm(std::span<const double> v);
double distance(const ParamVector& a, const ParamVector& b);

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<const double> flat() const { return data_; }
  std::span<double> flat() { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Inputs with their class indices.
struct Batch {
  Matrix inputs;
  std::vector<int> labels;

  std::size_t size() const { return labels.size(); }
  bool empty() const { return labels.empty(); }

  /// Throws unless the batch is nonempty, shapes agree with `arch`, and
  /// every label is a valid class index.
  void validate(const MlpArch& arch) const;
};

/// Glorot-uniform weights, zero biases. Deterministic in (arch, seed).
ParamVector init_params(const MlpArch& arch, std::uint64_t seed);

/// Class probabilities, one row per input row.
Matrix forward(const MlpArch& arch, const ParamVector& params,
               const Matrix& inputs);

struct LossGrad {
  double loss = 0.0;
  ParamVector grad;
};

/// Objective value and its gradient by reverse-mode differentiation.
/// The value is bit-identical to the corresponding function in
/// objective.hpp evaluated on the same batches.
LossGrad loss_grad(const MlpArch& arch, const ParamVector& params,
                   const Batch& train, const ObjectiveSpec& objective);
LossGrad loss_grad(const MlpArch& arch, const ParamVector& params,
                   const Batch& train, const Batch& poison,
                   const ObjectiveSpec& objective);

/// Throws a numeric error naming the first non-finite entry, if any.
void check_finite(std::span<const double> values, std::string_view what);
void check_params(const MlpArch& arch, const ParamVector& params);

}  // namespace basinscope
