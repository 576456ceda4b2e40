#pragma once

#include <algorithm>
#include <complex>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace adcalc {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

enum class ErrorKind {
  domain,
  derivative_order,
  aliasing,
  inconclusive_fit,
  quadrature_range,
  support,
  grid_mismatch,
  class_mismatch,
  tail,
  symbol_order,
  cutoff,
  floor,
  unstable_fit,
  range,
  decay,
  profile,
  certificate,
  format,
  config,
  io,
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::domain: return "domain";
    case ErrorKind::derivative_order: return "derivative-order";
    case ErrorKind::aliasing: return "aliasing";
    case ErrorKind::inconclusive_fit: return "inconclusive-fit";
    case ErrorKind::quadrature_range: return "quadrature-range";
    case ErrorKind::support: return "support";
    case ErrorKind::grid_mismatch: return "grid-mismatch";
    case ErrorKind::class_mismatch: return "class";
    case ErrorKind::tail: return "tail";
    case ErrorKind::symbol_order: return "symbol-order";
    case ErrorKind::cutoff: return "cutoff";
    case ErrorKind::floor: return "floor";
    case ErrorKind::unstable_fit: return "unstable-fit";
    case ErrorKind::range: return "range";
    case ErrorKind::decay: return "decay";
    case ErrorKind::profile: return "profile";
    case ErrorKind::certificate: return "certificate";
    case ErrorKind::format: return "format";
    case ErrorKind::config: return "config";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + " error: " + what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

// Worker count: explicit setting, then ADCALC_THREADS, then 1.
inline int& thread_setting() {
  static int n = 0;
  return n;
}

inline void set_threads(int n) { thread_setting() = std::max(0, n); }

inline int thread_count() {
  if (thread_setting() > 0) return thread_setting();
  if (const char* env = std::getenv("ADCALC_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 1;
}

// Runs body(i) for i in [0, n) on contiguous disjoint blocks. Each index is
// touched by exactly one worker, so results do not depend on the thread count
// as long as body only writes slot i.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(thread_count()), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  const std::size_t block = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        const std::size_t lo = w * block, hi = std::min(n, lo + block);
        for (std::size_t i = lo; i < hi; ++i) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

inline bool is_pow2(std::size_t n) { return n >= 2 && (n & (n - 1)) == 0; }

}  // namespace adcalc
