#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace jrc {

/// Selects the OpenMP kernel or its serial reference twin. Both paths use the
/// same block decomposition and reduction order, so results are bit-identical.
enum class Execution { Serial, Parallel };

/// Trials per work block. Independent of thread count.
inline constexpr std::size_t kTrialBlock = 512;

inline std::size_t block_count(std::size_t n, std::size_t block = kTrialBlock) {
  return (n + block - 1) / block;
}

/// Calls body(block_index, begin, end) for every block of [0, n).
template <class Body>
void for_each_block(std::size_t n, Execution exec, Body&& body, std::size_t block = kTrialBlock) {
  const auto nblocks = static_cast<std::int64_t>(block_count(n, block));
  if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t b = 0; b < nblocks; ++b) {
      const auto begin = static_cast<std::size_t>(b) * block;
      const auto end = begin + block < n ? begin + block : n;
      body(static_cast<std::size_t>(b), begin, end);
    }
  } else {
    for (std::int64_t b = 0; b < nblocks; ++b) {
      const auto begin = static_cast<std::size_t>(b) * block;
      const auto end = begin + block < n ? begin + block : n;
      body(static_cast<std::size_t>(b), begin, end);
    }
  }
}

/// Pairwise (tree) reduction in a fixed order; T needs operator+=.
/// Consumes the partials.
template <class T>
T pairwise_reduce(std::vector<T> parts) {
  if (parts.empty()) return T{};
  for (std::size_t stride = 1; stride < parts.size(); stride *= 2) {
    for (std::size_t i = 0; i + stride < parts.size(); i += 2 * stride) {
      parts[i] += parts[i + stride];
    }
  }
  return std::move(parts.front());
}

/// Applies f(i) for i in [0, n) with the requested execution policy.
template <class F>
void parallel_for(std::size_t n, Execution exec, F&& f) {
  const auto count = static_cast<std::int64_t>(n);
  if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < count; ++i) f(static_cast<std::size_t>(i));
  } else {
    for (std::int64_t i = 0; i < count; ++i) f(static_cast<std::size_t>(i));
  }
}

}  // namespace jrc
