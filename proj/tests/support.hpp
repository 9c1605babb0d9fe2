// Copyright 2026 The basinscope Authors
// SPDX-License-Identifier: Apache-2.0

// Helpers shared by the unit tests and the acceptance runner.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "basinscope/mlp.hpp"
#include "basinscope/rng.hpp"

namespace basinscope::testing {

inline ParamVector random_params(const MlpArch& arch, Rng& rng, double scale) {
  ParamVector p(arch.param_count());
  for (double& v : p) v = scale * rng.normal();
  return p;
}

inline Batch random_batch(const MlpArch& arch, std::size_t n, Rng& rng) {
  Batch b{Matrix(n, arch.input_dim()), std::vector<int>(n)};
  for (double& v : b.inputs.flat()) v = rng.uniform(-1.5, 1.5);
  for (int& y : b.labels) y = static_cast<int>(rng.below(arch.class_count()));
  return b;
}

/// Random tanh architecture with at most `max_params` parameters.
inline MlpArch random_arch(Rng& rng, std::size_t max_params) {
  for (;;) {
    std::vector<std::size_t> widths{1 + rng.below(3)};
    const std::size_t hidden = rng.below(4);
    for (std::size_t i = 0; i < hidden; ++i) widths.push_back(1 + rng.below(12));
    widths.push_back(2 + rng.below(3));
    MlpArch arch(widths, Activation::tanh);
    if (arch.param_count() <= max_params) return arch;
  }
}

/// Central finite difference of f along every coordinate of x.
inline std::vector<double> central_difference(
    const std::function<double(const ParamVector&)>& f, const ParamVector& x, double h) {
  std::vector<double> g(x.size());
  ParamVector probe = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double up = f(probe);
    probe[i] = x[i] - h;
    const double down = f(probe);
    probe[i] = x[i];
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

inline double relative_error(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6});
}

}  // namespace basinscope::testing
