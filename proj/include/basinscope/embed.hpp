// Copyright 2026 The basinscope Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "basinscope/mlp.hpp"

namespace basinscope {

enum class RowTag : std::uint8_t { sgd_iterate, bad_minimum, final };

std::string_view to_string(RowTag tag);
RowTag parse_row_tag(std::string_view name);

/// One parameter vector to embed. For bad minima `source_epoch` is the SGD
/// iterate the poison search started from.
struct EmbeddingRow {
  RowTag tag = RowTag::sgd_iterate;
  std::size_t source_epoch = 0;
  ParamVector params;
};

/// Stacks rows into an N x dim matrix; all rows must share one length and
/// there must be at least three.
Matrix stack_rows(const std::vector<EmbeddingRow>& rows);

struct PcaResult {
  Matrix projected;                 // N x min(k, rank)
  std::vector<double> explained;    // variance ratios, descending
};

/// Mean-centered projection onto the top-k principal directions, computed
/// from the eigendecomposition of the N x N Gram matrix. Directions whose
/// eigenvalue is below 1e-12 of the largest count as rank-deficient and are
/// dropped.
PcaResult pca_project(const Matrix& rows, std::size_t k);

struct TsneConfig {
  double perplexity = 30.0;
  std::size_t dims = 2;
  std::size_t iterations = 1000;
  double learning_rate = 200.0;
  double early_exaggeration = 12.0;
  std::size_t exaggeration_iterations = 250;
  double initial_momentum = 0.5;
  double final_momentum = 0.8;
  std::uint64_t seed = 0;
};

/// Row-conditional Gaussian affinities p(j|i) with per-point precision
/// chosen so that the entropy of row i equals log(perplexity).
struct ConditionalAffinities {
  Matrix p;                      // N x N, zero diagonal, rows sum to one
  std::vector<double> entropy;   // natural-log entropy of each row
  std::vector<double> precision; // 1 / (2 sigma_i^2)
};

ConditionalAffinities conditional_affinities(const Matrix& x, double perplexity);

/// Symmetrized joint affinities (p(j|i) + p(i|j)) / 2N.
Matrix joint_affinities(const ConditionalAffinities& conditional);

struct TsneResult {
  Matrix embedding;               // N x dims
  std::vector<double> kl_trace;   // KL(P || Q) after each post-exaggeration step
  std::size_t kl_increases = 0;   // steps in kl_trace that went up
};

/// Exact O(N^2) t-SNE: Student-t kernel, momentum with per-coordinate gains,
/// early exaggeration, Gaussian 1e-4 initialization from `seed`.
TsneResult tsne_embed(const Matrix& x, const TsneConfig& config);

}  // namespace basinscope
