#pragma once

#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace ucov {

inline unsigned default_jobs() {
  unsigned n = std::thread::hardware_concurrency();
  return n ? n : 1;
}

// Splits [0, total) into one contiguous chunk per worker and runs
// fn(begin, end, worker) on each. Results must be merged by the caller in
// worker order, which keeps every parallel computation deterministic.
inline void parallel_chunks(std::uint64_t total, unsigned jobs,
                            const std::function<void(std::uint64_t, std::uint64_t, unsigned)>& fn) {
  if (jobs == 0) jobs = default_jobs();
  if (jobs <= 1 || total < 2) {
    fn(0, total, 0);
    return;
  }
  std::vector<std::thread> ts;
  ts.reserve(jobs);
  const std::uint64_t per = (total + jobs - 1) / jobs;
  for (unsigned w = 0; w < jobs; ++w) {
    std::uint64_t b = std::min<std::uint64_t>(total, w * per);
    std::uint64_t e = std::min<std::uint64_t>(total, b + per);
    if (b >= e) break;
    ts.emplace_back([&fn, b, e, w] { fn(b, e, w); });
  }
  for (auto& t : ts) t.join();
}

}  // namespace ucov
