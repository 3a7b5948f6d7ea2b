#pragma once

// Thin FFTW3 wrapper. Plans are created once per (size, direction) under a
// mutex; execution uses the new-array interface on freshly aligned buffers,
// which FFTW documents as thread safe.

#include <fftw3.h>

#include <complex>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <utility>
#include <vector>

namespace gpscatter {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;
using rvec = std::vector<double>;

namespace fft {

namespace detail {

struct AlignedBuffer {
  explicit AlignedBuffer(std::size_t n) : data(fftw_alloc_complex(n)) {}
  ~AlignedBuffer() { fftw_free(data); }
  AlignedBuffer(const AlignedBuffer&) = delete;
  AlignedBuffer& operator=(const AlignedBuffer&) = delete;
  fftw_complex* data;
};

inline fftw_plan plan_for(int n, int sign) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, fftw_plan> cache;
  std::lock_guard lock(mutex);
  auto key = std::make_pair(n, sign);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  AlignedBuffer in(n), out(n);
  fftw_plan p = fftw_plan_dft_1d(n, in.data, out.data, sign, FFTW_ESTIMATE);
  cache.emplace(key, p);
  return p;
}

inline cvec execute(std::span<const cplx> in, int sign) {
  const int n = static_cast<int>(in.size());
  AlignedBuffer a(n), b(n);
  std::memcpy(static_cast<void*>(a.data), static_cast<const void*>(in.data()), sizeof(cplx) * n);
  fftw_execute_dft(plan_for(n, sign), a.data, b.data);
  cvec out(n);
  std::memcpy(static_cast<void*>(out.data()), static_cast<const void*>(b.data), sizeof(cplx) * n);
  return out;
}

}  // namespace detail

/// Unnormalised forward DFT: F_k = sum_j f_j exp(-2 pi i jk/n).
inline cvec forward(std::span<const cplx> in) { return detail::execute(in, FFTW_FORWARD); }

/// Inverse DFT including the 1/n factor, so inverse(forward(f)) == f.
inline cvec inverse(std::span<const cplx> in) {
  cvec out = detail::execute(in, FFTW_BACKWARD);
  const double s = 1.0 / static_cast<double>(in.size());
  for (auto& v : out) v *= s;
  return out;
}

}  // namespace fft
}  // namespace gpscatter
