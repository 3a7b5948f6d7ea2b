#pragma once

// Uniform periodic grid and the spectral toolbox built on it.
//
// Fourier convention: the unitary transform fhat(xi) = (2 pi)^{-1/2} int f(x)
// e^{-i x xi} dx, approximated on the grid by (2 pi)^{-1/2} dx F_k with F the
// unnormalised DFT. With this scaling int |fhat|^2 dxi = int |f|^2 dx holds
// exactly on the grid (discrete Parseval), and Sobolev norms read
// ||f||^2_{H^s_tau} = sum_k (tau^2 + k^2)^s |fhat_k|^2 dxi.
//
// Functions that tend to different constants at the two ends (kinks) are not
// periodic. A SampledFunction tagged Extension::even is processed on its
// even reflection about the right edge, which is smooth whenever the function
// is flat near both ends; spectral operations on such functions are then
// accurate up to the seam flatness.

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "gpscatter/error.hpp"
#include "gpscatter/fft.hpp"

namespace gpscatter {

struct Grid {
  double length = 0.0;
  int n = 0;
  double x0 = 0.0;

  double dx() const { return length / n; }
  double x(int j) const { return x0 + j * dx(); }
  double x_end() const { return x0 + length; }

  std::vector<double> points() const {
    std::vector<double> xs(n);
    for (int j = 0; j < n; ++j) xs[j] = x(j);
    return xs;
  }

  /// Discrete wavenumbers in FFT order; the Nyquist mode carries +n/2.
  std::vector<double> wavenumbers() const { return wavenumbers_for(n, length); }

  static std::vector<double> wavenumbers_for(int n, double length) {
    std::vector<double> k(n);
    const double base = 2.0 * std::numbers::pi / length;
    for (int j = 0; j < n; ++j) k[j] = base * (j <= n / 2 ? j : j - n);
    return k;
  }

  bool operator==(const Grid& o) const { return length == o.length && n == o.n && x0 == o.x0; }
};

inline bool is_power_of_two(long n) { return n > 0 && (n & (n - 1)) == 0; }

inline Grid make_grid(double length, int n, double x0) {
  require(std::isfinite(length) && length > 0.0, "grid length must be positive");
  require(is_power_of_two(n), "grid size must be a power of two, got " + std::to_string(n));
  require(n >= 8, "grid size must be at least 8");
  require(std::isfinite(x0), "grid origin must be finite");
  return Grid{length, n, x0};
}

enum class Extension { periodic, even };

struct SampledFunction {
  Grid grid;
  cvec values;
  Extension ext = Extension::periodic;

  SampledFunction() = default;
  SampledFunction(Grid g, cvec v, Extension e = Extension::periodic)
      : grid(g), values(std::move(v)), ext(e) {
    require(static_cast<int>(values.size()) == grid.n, "sample count does not match grid");
  }

  int size() const { return grid.n; }
  const cplx& operator[](int j) const { return values[j]; }
  cplx& operator[](int j) { return values[j]; }
};

template <class Fn>
SampledFunction sample(const Grid& g, Fn&& f, Extension ext = Extension::periodic) {
  cvec v(g.n);
  for (int j = 0; j < g.n; ++j) v[j] = cplx(f(g.x(j)));
  return SampledFunction(g, std::move(v), ext);
}

namespace detail {

inline cvec extended_values(const SampledFunction& f) {
  if (f.ext == Extension::periodic) return f.values;
  const int n = f.size();
  cvec e(2 * n);
  for (int j = 0; j < n; ++j) {
    e[j] = f.values[j];
    e[2 * n - 1 - j] = f.values[j];
  }
  return e;
}

inline double extended_length(const SampledFunction& f) {
  return f.ext == Extension::periodic ? f.grid.length : 2.0 * f.grid.length;
}

}  // namespace detail

/// Applies a Fourier multiplier m(k) (k in FFT order, Nyquist included).
template <class Multiplier>
SampledFunction apply_multiplier(const SampledFunction& f, Multiplier&& m) {
  cvec e = detail::extended_values(f);
  const int ne = static_cast<int>(e.size());
  auto k = Grid::wavenumbers_for(ne, detail::extended_length(f));
  cvec F = fft::forward(e);
  for (int j = 0; j < ne; ++j) F[j] *= m(k[j], j == ne / 2);
  cvec back = fft::inverse(F);
  back.resize(f.size());
  return SampledFunction(f.grid, std::move(back), f.ext);
}

/// d^order f / dx^order via the multiplier (ik)^order. For odd orders the
/// Nyquist mode is dropped, since its derivative is not representable.
inline SampledFunction spectral_derivative(const SampledFunction& f, int order) {
  require(order >= 1, "derivative order must be >= 1");
  return apply_multiplier(f, [order](double k, bool nyquist) -> cplx {
    if (nyquist && order % 2 == 1) return 0.0;
    return std::pow(cplx(0.0, k), order);
  });
}

/// Trapezoid rule over one period (spectrally accurate for smooth decaying
/// integrands).
inline cplx integrate(const SampledFunction& f) {
  cplx acc = 0.0;
  for (const auto& v : f.values) acc += v;
  return acc * f.grid.dx();
}

inline double integrate_real(std::span<const double> v, double dx) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc * dx;
}

inline double l2_norm(const SampledFunction& f) {
  double acc = 0.0;
  for (const auto& v : f.values) acc += std::norm(v);
  return std::sqrt(acc * f.grid.dx());
}

/// (sum_k (tau^2 + k^2)^s |fhat_k|^2 dxi)^{1/2} in the unitary convention.
/// The function is transformed on its own period (decaying input expected).
inline double sobolev_norm(const SampledFunction& f, double s, double tau) {
  require(std::isfinite(s), "sobolev exponent must be finite");
  require(std::isfinite(tau) && tau > 0.0, "tau must be positive");
  cvec F = fft::forward(f.values);
  auto k = f.grid.wavenumbers();
  double acc = 0.0;
  for (int j = 0; j < f.size(); ++j) {
    const double w = s == 0.0 ? 1.0 : std::pow(tau * tau + k[j] * k[j], s);
    acc += w * std::norm(F[j]);
  }
  // |fhat|^2 dxi = dx^2/(2 pi) |F|^2 * 2 pi / L = dx^2 / L |F|^2.
  const double dx = f.grid.dx();
  const double val = acc * dx * dx / f.grid.length;
  if (!std::isfinite(val)) throw NumericalError("sobolev_norm: non-finite input");
  return std::sqrt(val);
}

/// Sobolev inner product <f, g>_{H^s_tau} = sum (tau^2+k^2)^s fhat conj(ghat) dxi.
inline cplx sobolev_inner(const SampledFunction& f, const SampledFunction& g, double s, double tau) {
  cvec F = fft::forward(f.values);
  cvec G = fft::forward(g.values);
  auto k = f.grid.wavenumbers();
  cplx acc = 0.0;
  for (int j = 0; j < f.size(); ++j) {
    const double w = s == 0.0 ? 1.0 : std::pow(tau * tau + k[j] * k[j], s);
    acc += w * F[j] * std::conj(G[j]);
  }
  const double dx = f.grid.dx();
  return acc * (dx * dx / f.grid.length);
}

/// Convolution with the Gaussian approximate identity of width eps, realised
/// as the multiplier exp(-(eps k)^2 / 2).
inline SampledFunction mollify(const SampledFunction& f, double eps) {
  require(std::isfinite(eps) && eps > 0.0, "mollifier width must be positive");
  return apply_multiplier(f, [eps](double k, bool) -> cplx {
    const double a = eps * k;
    return std::exp(-0.5 * a * a);
  });
}

/// Antiderivative F with F(x0) = 0, computed spectrally: the mean part is
/// integrated exactly, the oscillating part through 1/(ik).
inline SampledFunction cumulative_integral(const SampledFunction& f) {
  const int n = f.size();
  cvec F = fft::forward(f.values);
  const cplx mean = F[0] / static_cast<double>(n);
  auto k = f.grid.wavenumbers();
  F[0] = 0.0;
  for (int j = 1; j < n; ++j) F[j] = (j == n / 2) ? cplx(0.0) : F[j] / cplx(0.0, k[j]);
  cvec p = fft::inverse(F);
  const cplx p0 = p[0];
  cvec out(n);
  for (int j = 0; j < n; ++j) out[j] = p[j] - p0 + mean * (f.grid.x(j) - f.grid.x0);
  return SampledFunction(f.grid, std::move(out), Extension::even);
}

/// Band-limited interpolation onto a grid `factor` times finer (same x0 and
/// length). factor must be a power of two.
inline SampledFunction refine(const SampledFunction& f, int factor) {
  require(is_power_of_two(factor), "refinement factor must be a power of two");
  if (factor == 1) return f;
  cvec e = detail::extended_values(f);
  const int ne = static_cast<int>(e.size());
  const int nf = ne * factor;
  cvec F = fft::forward(e);
  cvec P(nf, cplx(0.0));
  const int half = ne / 2;
  for (int j = 0; j < half; ++j) P[j] = F[j];
  for (int j = half + 1; j < ne; ++j) P[nf - ne + j] = F[j];
  P[half] = 0.5 * F[half];
  P[nf - half] = 0.5 * F[half];
  cvec v = fft::inverse(P);
  for (auto& x : v) x *= static_cast<double>(factor);
  v.resize(static_cast<std::size_t>(f.size()) * factor);
  Grid g{f.grid.length, f.grid.n * factor, f.grid.x0};
  return SampledFunction(g, std::move(v), f.ext);
}

/// Pointwise combination helper.
template <class Fn>
SampledFunction map_values(const SampledFunction& f, Fn&& fn) {
  cvec v(f.size());
  for (int j = 0; j < f.size(); ++j) v[j] = fn(f.values[j]);
  return SampledFunction(f.grid, std::move(v), f.ext);
}

/// Largest |f| over the outer `fraction` of the grid at each end.
inline double edge_max_abs(const SampledFunction& f, double fraction) {
  const int m = std::max(1, static_cast<int>(std::ceil(fraction * f.size())));
  double best = 0.0;
  for (int j = 0; j < m; ++j) {
    best = std::max(best, std::abs(f.values[j]));
    best = std::max(best, std::abs(f.values[f.size() - 1 - j]));
  }
  return best;
}

}  // namespace gpscatter
