#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace fracsys {

struct Vec2 {
  double x{0.0};
  double y{0.0};
};

inline double dist(const Vec2& a, const Vec2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

inline bool lex_less(const Vec2& a, const Vec2& b) {
  if (a.x != b.x) return a.x < b.x;
  return a.y < b.y;
}

// |a|^q * sign(a), with signed_pow(0, q) = 0 for every q.
inline double signed_pow(double a, double q) {
  if (a == 0.0) return 0.0;
  return std::copysign(std::pow(std::abs(a), q), a);
}

inline double log_add_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(std::min(a, b) - m));
}

// Fixed-order pairwise (cascade) summation. The reduction tree depends only
// on the length of the input, never on thread count.
inline double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 16) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

// Streaming log-sum-exp with a running maximum. Deterministic for a fixed
// insertion order.
class LogSumAcc {
 public:
  void add(double log_term) {
    if (log_term == -std::numeric_limits<double>::infinity()) return;
    if (log_term > max_) {
      if (max_ != -std::numeric_limits<double>::infinity())
        sum_ = sum_ * std::exp(max_ - log_term) + 1.0;
      else
        sum_ = 1.0;
      max_ = log_term;
    } else {
      sum_ += std::exp(log_term - max_);
    }
  }

  void merge(const LogSumAcc& other) {
    if (other.empty()) return;
    if (empty()) {
      *this = other;
      return;
    }
    if (other.max_ > max_) {
      sum_ = sum_ * std::exp(max_ - other.max_) + other.sum_;
      max_ = other.max_;
    } else {
      sum_ += other.sum_ * std::exp(other.max_ - max_);
    }
  }

  bool empty() const {
    return max_ == -std::numeric_limits<double>::infinity();
  }

  double log_value() const {
    if (empty()) return -std::numeric_limits<double>::infinity();
    return max_ + std::log(sum_);
  }

 private:
  double max_{-std::numeric_limits<double>::infinity()};
  double sum_{0.0};
};

// Worker cap from FRACSYS_THREADS; defaults to the hardware concurrency.
inline unsigned worker_count() {
  if (const char* env = std::getenv("FRACSYS_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

// Runs f(begin, end) over fixed-size chunks of [0, n). Chunk boundaries are
// independent of the number of workers, so any chunk-local result is
// reproducible across thread counts.
template <class F>
void parallel_chunks(std::size_t n, std::size_t chunk, F&& f) {
  if (n == 0) return;
  const std::size_t nchunks = (n + chunk - 1) / chunk;
  const unsigned workers = std::min<std::size_t>(worker_count(), nchunks);
  if (workers <= 1) {
    for (std::size_t c = 0; c < nchunks; ++c)
      f(c, c * chunk, std::min(n, (c + 1) * chunk));
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t c = w; c < nchunks; c += workers)
        f(c, c * chunk, std::min(n, (c + 1) * chunk));
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace fracsys
