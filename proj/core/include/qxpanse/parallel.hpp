#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace qxpanse {

// Splits [0, n) into contiguous chunks, one per worker. Work items must be
// independent; the partition never affects results.
template <typename F>
void parallel_for(std::size_t n, int threads, F&& body) {
  std::size_t const workers =
      std::clamp<std::size_t>(threads > 0 ? static_cast<std::size_t>(threads) : 1, 1,
                              std::max<std::size_t>(n, 1));
  if (workers == 1) {
    body(std::size_t{0}, n);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  std::size_t const chunk = (n + workers - 1) / workers;
  for (std::size_t w = 1; w < workers; ++w) {
    std::size_t const begin = std::min(n, w * chunk);
    std::size_t const end = std::min(n, begin + chunk);
    pool.emplace_back([&body, begin, end] { body(begin, end); });
  }
  body(std::size_t{0}, std::min(n, chunk));
}

}  // namespace qxpanse
