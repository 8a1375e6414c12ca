#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

namespace asyncisac {

/// Neumaier-compensated accumulator. Results depend only on the order of add() calls.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct SampleSummary {
  double mean = 0.0;
  double stderr_of_mean = 0.0;
  std::int64_t count = 0;
};

/// Mean and standard error of the mean, reduced in index order with compensated sums.
inline SampleSummary summarize(std::span<const double> samples) {
  SampleSummary out;
  out.count = static_cast<std::int64_t>(samples.size());
  if (samples.empty()) return out;
  CompensatedSum sum;
  for (double x : samples) sum.add(x);
  out.mean = sum.value() / static_cast<double>(samples.size());
  if (samples.size() > 1) {
    CompensatedSum sq;
    for (double x : samples) sq.add((x - out.mean) * (x - out.mean));
    const double var = sq.value() / static_cast<double>(samples.size() - 1);
    out.stderr_of_mean = std::sqrt(var / static_cast<double>(samples.size()));
  }
  return out;
}

/// Runs body(i) for i in [0, count) on up to `threads` workers. Each index is visited exactly
/// once; callers write into per-index slots so the reduction order stays fixed. The first
/// exception thrown by a body is rethrown after all workers join.
template <typename Body>
void parallel_for(std::int64_t count, int threads, Body&& body) {
  const int workers = static_cast<int>(std::clamp<std::int64_t>(threads, 1, std::max<std::int64_t>(count, 1)));
  if (workers <= 1) {
    for (std::int64_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::int64_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
          try {
            body(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next.store(count);
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace asyncisac
