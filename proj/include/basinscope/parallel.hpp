// Copyright 2026 The basinscope Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>

namespace basinscope {

/// Number of workers used when a caller passes 0.
std::size_t default_workers();

/// Runs body(i) for every i in [0, count) on up to `workers` threads.
/// Items are claimed dynamically, so body must write its result to a slot
/// owned by i; output order is then independent of scheduling. The first
/// exception thrown by any item is rethrown after all workers stop.
void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& body);

}  // namespace basinscope
