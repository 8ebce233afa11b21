#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace hardy {

/// Worker cap: HARDY_OPTIM_THREADS if set and positive, else the hardware count.
inline unsigned max_threads() {
  if (const char* env = std::getenv("HARDY_OPTIM_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return static_cast<unsigned>(n);
    } catch (...) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// out[i] = fn(i) for i < count, using up to max_threads() workers with a
/// static interleaved partition. The first exception (lowest index) is rethrown.
template <class T, class Fn>
std::vector<T> parallel_map(std::size_t count, Fn&& fn) {
  std::vector<T> out(count);
  std::vector<std::exception_ptr> errors(count);
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(max_threads(), count));
  auto work = [&](unsigned id) {
    for (std::size_t i = id; i < count; i += workers) {
      try {
        out[i] = fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned id = 0; id < workers; ++id) pool.emplace_back(work, id);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace hardy
