// Copyright 2026 The basinscope Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>

namespace basinscope {

/// ln Gamma(x) for x > 0 by the Lanczos approximation (g = 7, nine terms),
/// with the reflection formula below 0.5.
double log_gamma(double x);

/// log(sum_i exp(v_i)), shifted by the maximum so nothing overflows.
/// Returns -inf for an empty span.
double log_sum_exp(std::span<const double> values);

/// Natural log of the volume of the unit n-ball, pi^(n/2) / Gamma(1 + n/2).
double log_unit_ball_volume(std::size_t n);

/// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> a, std::span<const double> b);

}  // namespace basinscope
