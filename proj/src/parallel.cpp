#include "muskat/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace muskat {

namespace {

int env_threads() {
  const char* raw = std::getenv("MUSKAT_THREADS");
  if (raw == nullptr) return 1;
  try {
    const int n = std::stoi(raw);
    return n > 0 ? n : 1;
  } catch (const std::exception&) {
    return 1;
  }
}

std::atomic<int>& configured() {
  static std::atomic<int> n{env_threads()};
  return n;
}

}  // namespace

int thread_count() { return configured().load(); }

void set_thread_count(int n) { configured().store(std::max(1, n)); }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const auto workers = static_cast<std::size_t>(std::min<std::size_t>(static_cast<std::size_t>(thread_count()), n));
  if (workers <= 1) {
    for (std::size_t k = 0; k < n; ++k) body(k);
    return;
  }
  std::mutex guard;
  std::exception_ptr first;
  std::size_t first_index = std::numeric_limits<std::size_t>::max();
  auto run_block = [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      try {
        body(k);
      } catch (...) {
        std::lock_guard<std::mutex> lock(guard);
        if (k < first_index) {
          first_index = k;
          first = std::current_exception();
        }
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const std::size_t block = (n + workers - 1) / workers;
  for (std::size_t w = 1; w < workers; ++w) {
    const std::size_t begin = w * block, end = std::min(n, begin + block);
    if (begin < end) pool.emplace_back(run_block, begin, end);
  }
  run_block(0, std::min(n, block));
  for (auto& th : pool) th.join();
  if (first) std::rethrow_exception(first);
}

}  // namespace muskat
