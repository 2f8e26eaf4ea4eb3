#pragma once

#include <cstddef>
#include <span>

namespace stripwall {

// Pairwise (tree) summation; the order depends only on the length, so
// results are bitwise reproducible regardless of thread count.
double pairwise_sum(std::span<const double> v);

// Caps internal data parallelism; <= 0 means "leave the runtime default".
void set_thread_cap(int threads);

// Reads WALL_THREADS from the environment and applies it.
void apply_thread_cap_from_env();

int thread_cap();

}  // namespace stripwall
