// Copyright 2026 The basinscope Authors
// SPDX-License-Identifier: Apache-2.0

#include "basinscope/embed.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "basinscope/error.hpp"
#include "basinscope/rng.hpp"

namespace basinscope {

std::string_view to_string(RowTag tag) {
  switch (tag) {
    case RowTag::sgd_iterate: return "sgd_iterate";
    case RowTag::bad_minimum: return "bad_minimum";
    case RowTag::final: return "final";
  }
  return "?";
}

RowTag parse_row_tag(std::string_view name) {
  if (name == "sgd_iterate") return RowTag::sgd_iterate;
  if (name == "bad_minimum") return RowTag::bad_minimum;
  if (name == "final") return RowTag::final;
  throw invalid_argument("unknown row tag '" + std::string(name) + "'");
}

Matrix stack_rows(const std::vector<EmbeddingRow>& rows) {
  if (rows.size() < 3) throw invalid_argument("embedding needs at least three rows");
  const std::size_t dim = rows.front().params.size();
  Matrix out(rows.size(), dim);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].params.size() != dim) {
      throw invalid_argument("embedding rows differ in length");
    }
    std::copy(rows[i].params.begin(), rows[i].params.end(), out.row(i).begin());
  }
  return out;
}

PcaResult pca_project(const Matrix& rows, std::size_t k) {
  if (k < 1) throw invalid_argument("PCA needs k >= 1");
  const auto n = static_cast<Eigen::Index>(rows.rows());
  const auto d = static_cast<Eigen::Index>(rows.cols());
  if (n < 2) throw invalid_argument("PCA needs at least two rows");
  check_finite(rows.flat(), "PCA input");

  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const RowMajor> x(rows.flat().data(), n, d);
  const Eigen::RowVectorXd mean = x.colwise().mean();
  const Eigen::MatrixXd centered = x.rowwise() - mean;
  const Eigen::MatrixXd gram = centered * centered.transpose();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
  if (solver.info() != Eigen::Success) {
    throw numeric_failure("Gram matrix eigendecomposition failed");
  }
  // Eigen sorts ascending; walk from the top.
  const Eigen::VectorXd& values = solver.eigenvalues();
  const Eigen::MatrixXd& vectors = solver.eigenvectors();
  const double top = std::max(values(n - 1), 0.0);
  const double total = std::max(gram.trace(), 0.0);

  std::vector<Eigen::Index> kept;
  for (Eigen::Index j = n - 1; j >= 0 && kept.size() < k; --j) {
    if (top == 0.0 || values(j) <= 1e-12 * top) break;
    kept.push_back(j);
  }

  PcaResult out;
  out.projected = Matrix(rows.rows(), kept.size());
  for (std::size_t c = 0; c < kept.size(); ++c) {
    const Eigen::Index j = kept[c];
    Eigen::VectorXd u = vectors.col(j);
    // Fix the sign so the largest-magnitude loading is positive.
    Eigen::Index arg = 0;
    u.cwiseAbs().maxCoeff(&arg);
    if (u(arg) < 0.0) u = -u;
    const double scale = std::sqrt(values(j));
    for (Eigen::Index i = 0; i < n; ++i) {
      out.projected(static_cast<std::size_t>(i), c) = u(i) * scale;
    }
    out.explained.push_back(total > 0.0 ? values(j) / total : 0.0);
  }
  return out;
}

namespace {

Matrix squared_distances(const Matrix& x) {
  const std::size_t n = x.rows();
  Matrix dist(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double sum = 0.0;
      for (std::size_t c = 0; c < x.cols(); ++c) {
        const double diff = x(i, c) - x(j, c);
        sum += diff * diff;
      }
      dist(i, j) = dist(j, i) = sum;
    }
  }
  return dist;
}

}  // namespace

ConditionalAffinities conditional_affinities(const Matrix& x, double perplexity) {
  const std::size_t n = x.rows();
  if (n < 5) throw invalid_argument("t-SNE needs at least five points");
  if (!(perplexity > 0.0) || !(perplexity < static_cast<double>(n))) {
    throw invalid_argument("perplexity must lie in (0, N)");
  }
  check_finite(x.flat(), "t-SNE input");

  const Matrix dist = squared_distances(x);
  const double target = std::log(perplexity);
  constexpr double kTolerance = 1e-6;
  constexpr int kMaxSteps = 500;

  ConditionalAffinities out{Matrix(n, n), std::vector<double>(n),
                            std::vector<double>(n)};
  std::vector<double> row(n);
  for (std::size_t i = 0; i < n; ++i) {
    // Distances are shifted by the row minimum; the normalized row is
    // unchanged and the exponentials stay in range.
    double d_min = HUGE_VAL;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) d_min = std::min(d_min, dist(i, j));
    }
    double beta = 1.0;
    double lo = 0.0, hi = HUGE_VAL;
    double entropy = 0.0;
    for (int step = 0; step < kMaxSteps; ++step) {
      double sum = 0.0, weighted = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) {
          row[j] = 0.0;
          continue;
        }
        const double shifted = dist(i, j) - d_min;
        row[j] = std::exp(-beta * shifted);
        sum += row[j];
        weighted += shifted * row[j];
      }
      entropy = std::log(sum) + beta * weighted / sum;
      for (std::size_t j = 0; j < n; ++j) row[j] /= sum;
      const double gap = entropy - target;
      if (std::abs(gap) < kTolerance) break;
      if (gap > 0.0) {  // too flat: sharpen
        lo = beta;
        beta = std::isinf(hi) ? beta * 2.0 : 0.5 * (beta + hi);
      } else {
        hi = beta;
        beta = 0.5 * (beta + lo);
      }
    }
    for (std::size_t j = 0; j < n; ++j) out.p(i, j) = row[j];
    out.entropy[i] = entropy;
    out.precision[i] = beta;
  }
  return out;
}

Matrix joint_affinities(const ConditionalAffinities& conditional) {
  const std::size_t n = conditional.p.rows();
  Matrix joint(n, n);
  const double scale = 1.0 / (2.0 * static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      joint(i, j) = (conditional.p(i, j) + conditional.p(j, i)) * scale;
    }
  }
  return joint;
}

namespace {

double kl_divergence(const Matrix& p, const Matrix& y) {
  const std::size_t n = y.rows();
  Matrix num(n, n);
  double z = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      double d = 0.0;
      for (std::size_t c = 0; c < y.cols(); ++c) {
        const double diff = y(i, c) - y(j, c);
        d += diff * diff;
      }
      num(i, j) = 1.0 / (1.0 + d);
      z += num(i, j);
    }
  }
  double kl = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j || p(i, j) <= 0.0) continue;
      const double q = std::max(num(i, j) / z, 1e-300);
      kl += p(i, j) * std::log(p(i, j) / q);
    }
  }
  return kl;
}

}  // namespace

TsneResult tsne_embed(const Matrix& x, const TsneConfig& config) {
  if (config.dims < 1) throw invalid_argument("t-SNE needs dims >= 1");
  if (config.iterations <= config.exaggeration_iterations) {
    throw invalid_argument("t-SNE needs more iterations than exaggeration iterations");
  }
  if (!(config.learning_rate > 0.0)) throw invalid_argument("t-SNE learning rate must be positive");
  const Matrix p = joint_affinities(conditional_affinities(x, config.perplexity));
  const std::size_t n = x.rows();
  const std::size_t dims = config.dims;

  TsneResult out;
  Matrix& y = out.embedding;
  y = Matrix(n, dims);
  Rng rng(config.seed);
  for (double& v : y.flat()) v = 1e-4 * rng.normal();

  Matrix update(n, dims, 0.0);
  Matrix gains(n, dims, 1.0);
  Matrix grad(n, dims);
  Matrix num(n, n);

  for (std::size_t it = 0; it < config.iterations; ++it) {
    const bool exaggerating = it < config.exaggeration_iterations;
    const double exaggeration = exaggerating ? config.early_exaggeration : 1.0;
    const double momentum = exaggerating ? config.initial_momentum : config.final_momentum;

    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      num(i, i) = 0.0;
      for (std::size_t j = i + 1; j < n; ++j) {
        double d = 0.0;
        for (std::size_t c = 0; c < dims; ++c) {
          const double diff = y(i, c) - y(j, c);
          d += diff * diff;
        }
        num(i, j) = num(j, i) = 1.0 / (1.0 + d);
        z += 2.0 * num(i, j);
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < dims; ++c) grad(i, c) = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        const double mult = 4.0 * (exaggeration * p(i, j) - num(i, j) / z) * num(i, j);
        for (std::size_t c = 0; c < dims; ++c) grad(i, c) += mult * (y(i, c) - y(j, c));
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < dims; ++c) {
        double& g = gains(i, c);
        const bool same_sign = (grad(i, c) > 0.0) == (update(i, c) > 0.0);
        g = same_sign ? g * 0.8 : g + 0.2;
        g = std::max(g, 0.01);
        update(i, c) = momentum * update(i, c) - config.learning_rate * g * grad(i, c);
        y(i, c) += update(i, c);
      }
    }
    for (std::size_t c = 0; c < dims; ++c) {
      double mean = 0.0;
      for (std::size_t i = 0; i < n; ++i) mean += y(i, c);
      mean /= static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i) y(i, c) -= mean;
    }
    if (!exaggerating) {
      const double kl = kl_divergence(p, y);
      if (!out.kl_trace.empty() && kl > out.kl_trace.back()) ++out.kl_increases;
      out.kl_trace.push_back(kl);
    }
  }
  check_finite(y.flat(), "t-SNE embedding");
  return out;
}

}  // namespace basinscope
