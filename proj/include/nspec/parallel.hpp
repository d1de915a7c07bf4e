#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace nspec {

/// Thread budget: hardware concurrency, capped by the NSPEC_THREADS
/// environment variable when set.
inline unsigned thread_budget() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("NSPEC_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
  }
  return n;
}

/// Static block partition of [0, n); body(i) must be independent per index.
template <typename F>
void parallel_for(size_t n, F body) {
  const unsigned workers = std::min<size_t>(thread_budget(), n);
  if (workers <= 1) {
    for (size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (unsigned t = 0; t < workers; ++t) {
    threads.emplace_back([=] {
      for (size_t i = t; i < n; i += workers) body(i);
    });
  }
  for (auto& th : threads) th.join();
}

}  // namespace nspec
