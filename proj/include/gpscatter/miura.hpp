#pragma once

// Miura map M(q) = q_x + q^2 (shifted to u = M(q) - 1), its inverse through
// the Riccati equation v' = u + 1 - v^2, the explicit right inverse of the
// linearisation h -> h' + 2(w0 - 1) h, and the mKdV -> KdV6 correspondence.
//
// The inverse never forms the ground state phi; v = (ln phi)' is integrated
// directly, backwards from the right edge where v = -1 is attracting.

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "gpscatter/error.hpp"
#include "gpscatter/evolution.hpp"
#include "gpscatter/grid.hpp"

namespace gpscatter {

namespace detail {

inline SampledFunction as_real(SampledFunction f) {
  for (auto& v : f.values) v = v.real();
  return f;
}

inline Extension natural_extension(const SampledFunction& f) {
  return std::abs(f.values.front() - f.values.back()) > 1e-8 ? Extension::even : Extension::periodic;
}

inline void require_real(const SampledFunction& f, const std::string& what) {
  for (const auto& v : f.values) require(v.imag() == 0.0, what + " must be real-valued");
}

// Classical RK4 for y' = F(x, y, c) integrated from the last grid point to the
// first, where c(x) is a vector of coefficient functions sampled on a grid
// `refine` times finer than f's grid, and each step spans two fine cells.
// Returns y on the original grid; `guard` may throw to abort.
template <class Rhs, class Guard>
rvec integrate_backward(const Grid& g, int refine_factor, const std::vector<rvec>& coeffs, double y_end, Rhs&& F,
                        Guard&& guard) {
  const double h = g.dx() / refine_factor;
  const double H = 2.0 * h;
  auto c = [&](int i) {
    rvec out(coeffs.size());
    for (std::size_t k = 0; k < coeffs.size(); ++k) out[k] = coeffs[k][i];
    return out;
  };
  rvec out(g.n);
  int i = (g.n - 1) * refine_factor;
  double y = y_end;
  out[g.n - 1] = y;
  while (i >= 2) {
    const double x = g.x0 + i * h;
    const auto c0 = c(i), c1 = c(i - 1), c2 = c(i - 2);
    const double k1 = F(x, y, c0);
    const double k2 = F(x - h, y - 0.5 * H * k1, c1);
    const double k3 = F(x - h, y - 0.5 * H * k2, c1);
    const double k4 = F(x - H, y - H * k3, c2);
    y -= H / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    i -= 2;
    guard(g.x0 + i * h, y);
    if (i % refine_factor == 0) out[i / refine_factor] = y;
  }
  return out;
}

inline rvec refined_real(const SampledFunction& f, int factor) {
  SampledFunction e = f;
  e.ext = natural_extension(f);
  auto r = refine(e, factor);
  rvec out(r.size());
  for (int j = 0; j < r.size(); ++j) out[j] = r.values[j].real();
  return out;
}

inline double l2_real(const rvec& v, double dx) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc * dx);
}

}  // namespace detail

/// u = q_x + q^2 - 1 for real q.
inline SampledFunction miura_map(const SampledFunction& q) {
  detail::require_real(q, "Miura input");
  SampledFunction e = q;
  e.ext = detail::natural_extension(q);
  const auto qx = spectral_derivative(e, 1);
  cvec u(q.size());
  for (int j = 0; j < q.size(); ++j) u[j] = qx.values[j].real() + q.values[j].real() * q.values[j].real() - 1.0;
  return SampledFunction(q.grid, std::move(u), Extension::periodic);
}

struct MiuraInverse {
  SampledFunction v;
  double residual = 0.0;  // max |v' + v^2 - (u + 1)|, spectral derivative
};

struct InverseMiuraOptions {
  int refine_factor = 8;
  double residual_tol = 1e-7;
  double blowup = 1e6;
};

/// Solves v' + v^2 = u + 1 with v = -1 at the right edge.
inline MiuraInverse inverse_miura(const SampledFunction& u, const InverseMiuraOptions& opt = {}) {
  detail::require_real(u, "KdV field");
  const auto uf = detail::refined_real(u, opt.refine_factor);
  const rvec v = detail::integrate_backward(
      u.grid, opt.refine_factor, {uf}, -1.0, [](double, double y, const rvec& c) { return c[0] + 1.0 - y * y; },
      [&](double x, double y) {
        if (!std::isfinite(y) || std::abs(y) > opt.blowup)
          throw NumericalError("spectral condition violated (eigenvalue <= -1 suspected): Riccati solution blew up near x = " +
                               std::to_string(x));
      });
  cvec vc(v.begin(), v.end());
  SampledFunction out(u.grid, std::move(vc));
  // even reflection: v need not match exactly at the two ends
  out.ext = Extension::even;
  const auto vx = spectral_derivative(out, 1);
  double res = 0.0;
  for (int j = 0; j < u.size(); ++j)
    res = std::max(res, std::abs(vx.values[j].real() + v[j] * v[j] - u.values[j].real() - 1.0));
  if (!(res <= opt.residual_tol))
    throw NumericalError("inverse Miura residual " + std::to_string(res) + " exceeds tolerance");
  out.ext = Extension::periodic;
  return {std::move(out), res};
}

struct LinearizedInverse {
  SampledFunction tf;
  double residual_l2 = 0.0;  // ||(Tf)' + 2(w0-1) Tf - f||_{L^2}
};

/// (Tf)(x) = -int_x^inf exp(2 int_x^y (w0 - 1)) f(y) dy, computed as the
/// solution of T' = f - 2(w0 - 1) T with T = 0 at the right edge.
inline LinearizedInverse linearized_inverse(const SampledFunction& w0, const SampledFunction& f, int refine_factor = 8) {
  detail::require_real(w0, "w0");
  detail::require_real(f, "f");
  require(w0.grid == f.grid, "w0 and f must share a grid");
  const auto wf = detail::refined_real(w0, refine_factor);
  const auto ff = detail::refined_real(f, refine_factor);
  const rvec t = detail::integrate_backward(
      f.grid, refine_factor, {wf, ff}, 0.0,
      [](double, double y, const rvec& c) { return c[1] - 2.0 * (c[0] - 1.0) * y; }, [](double, double) {});
  SampledFunction out(f.grid, cvec(t.begin(), t.end()));
  out.ext = Extension::even;
  const auto tx = spectral_derivative(out, 1);
  rvec r(f.size());
  for (int j = 0; j < f.size(); ++j)
    r[j] = tx.values[j].real() + 2.0 * (w0.values[j].real() - 1.0) * t[j] - f.values[j].real();
  out.ext = Extension::periodic;
  return {std::move(out), detail::l2_real(r, f.grid.dx())};
}

struct CorrespondencePoint {
  double t = 0.0;
  double mismatch_l2 = 0.0;
};

struct CorrespondenceReport {
  std::vector<CorrespondencePoint> points;
  double max_mismatch = 0.0;
};

/// Evolves q0 under mKdV and u0 = M(q0) - 1 under KdV6 independently and
/// compares M(q(t)) - 1 with u(t) at each snapshot.
inline CorrespondenceReport mkdv_kdv_correspondence(const SampledFunction& q0, double t_final, double dt = 1e-3,
                                                    int snapshot_every = 0, FieldTolerance tol = {}) {
  detail::require_real(q0, "mKdV data");
  const GPField psi(q0, tol);
  EvolveOptions opt;
  opt.snapshot_every = snapshot_every;
  const auto qt = evolve_mkdv(psi, dt, t_final, opt);
  const auto ut = evolve_kdv6(miura_map(q0), dt, t_final, opt);
  CorrespondenceReport rep;
  for (std::size_t i = 0; i < qt.states.size(); ++i) {
    const auto mu = miura_map(detail::as_real(qt.states[i]));
    rvec diff(mu.size());
    for (int j = 0; j < mu.size(); ++j) diff[j] = mu.values[j].real() - ut.states[i].values[j].real();
    const double m = detail::l2_real(diff, q0.grid.dx());
    rep.points.push_back({qt.times[i], m});
    rep.max_mismatch = std::max(rep.max_mismatch, m);
  }
  return rep;
}

}  // namespace gpscatter
