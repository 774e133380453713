#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

#include "stbc/rng.hpp"

namespace stbc {

/// Monte Carlo controls. threads == 0 means std::thread::hardware_concurrency().
struct McOptions {
  std::uint64_t trials = 100000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
};

inline unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Evaluates fn(t) for t in [0, n) and returns the per-trial results in index
/// order. Work is split into contiguous ranges; the result never depends on
/// the thread count.
template <class T, class Fn>
std::vector<T> evaluate_trials(std::uint64_t n, unsigned threads, Fn&& fn) {
  std::vector<T> out(n);
  const auto workers = static_cast<std::uint64_t>(std::min<std::uint64_t>(resolve_threads(threads), std::max<std::uint64_t>(n, 1)));
  if (workers <= 1) {
    for (std::uint64_t t = 0; t < n; ++t) out[t] = fn(t);
    return out;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::uint64_t w = 0; w < workers; ++w) {
      const std::uint64_t begin = n * w / workers;
      const std::uint64_t end = n * (w + 1) / workers;
      pool.emplace_back([&, w, begin, end] {
        try {
          for (std::uint64_t t = begin; t < end; ++t) out[t] = fn(t);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

struct SampleMoments {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t count = 0;
};

/// Two-pass mean and standard error of the mean, summed in index order.
inline SampleMoments sample_moments(const std::vector<double>& xs) {
  SampleMoments m;
  m.count = xs.size();
  if (xs.empty()) return m;
  double sum = 0.0;
  for (double x : xs) sum += x;
  m.mean = sum / static_cast<double>(xs.size());
  if (xs.size() < 2) return m;
  double ss = 0.0;
  for (double x : xs) ss += (x - m.mean) * (x - m.mean);
  const double var = ss / static_cast<double>(xs.size() - 1);
  m.std_error = std::sqrt(var / static_cast<double>(xs.size()));
  return m;
}

}  // namespace stbc
