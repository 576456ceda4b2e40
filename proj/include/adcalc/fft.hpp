#pragma once

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

#include "adcalc/core.hpp"

namespace adcalc::fft {

namespace detail {

struct PlanCache {
  std::mutex mu;
  std::map<std::pair<int, int>, fftw_plan> plans;

  ~PlanCache() {
    for (auto& [key, plan] : plans) fftw_destroy_plan(plan);
  }

  fftw_plan get(int n, int sign) {
    std::lock_guard<std::mutex> lock(mu);
    auto it = plans.find({n, sign});
    if (it != plans.end()) return it->second;
    std::vector<Complex> a(static_cast<std::size_t>(n)), b(static_cast<std::size_t>(n));
    fftw_plan p = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(a.data()),
                                   reinterpret_cast<fftw_complex*>(b.data()), sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans.emplace(std::make_pair(n, sign), p);
    return p;
  }
};

inline PlanCache& cache() {
  static PlanCache c;
  return c;
}

inline void run(const Complex* in, Complex* out, std::size_t n, int sign) {
  fftw_plan p = cache().get(static_cast<int>(n), sign);
  fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

}  // namespace detail

// out[k] = sum_n in[n] e^{-2 pi i n k / N}
inline void forward(const Complex* in, Complex* out, std::size_t n) { detail::run(in, out, n, FFTW_FORWARD); }

// out[n] = sum_k in[k] e^{+2 pi i n k / N}, unnormalised
inline void backward(const Complex* in, Complex* out, std::size_t n) { detail::run(in, out, n, FFTW_BACKWARD); }

inline std::vector<Complex> forward(const std::vector<Complex>& in) {
  std::vector<Complex> out(in.size());
  forward(in.data(), out.data(), in.size());
  return out;
}

inline std::vector<Complex> backward(const std::vector<Complex>& in) {
  std::vector<Complex> out(in.size());
  backward(in.data(), out.data(), in.size());
  return out;
}

}  // namespace adcalc::fft
