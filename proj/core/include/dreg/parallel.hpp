// Copyright the dreg authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#pragma once

#include <cstdint>
#include <functional>

namespace dreg {

/// Sets the number of worker threads used by parallel_for. Values < 1 are clamped to 1.
/// Thread count 1 is the bit-reproducible baseline; loops scheduled through parallel_for
/// write disjoint outputs, so results are identical for any fixed thread count.
void set_thread_count(int n);

int thread_count();

/// Runs fn over contiguous chunks covering [begin, end). With thread_count() == 1 the call
/// degenerates to fn(begin, end) on the caller's thread.
void parallel_for(std::int64_t begin, std::int64_t end,
                  const std::function<void(std::int64_t, std::int64_t)>& fn);

}  // namespace dreg
