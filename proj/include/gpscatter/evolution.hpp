#pragma once

// Time integrators.
//
//   GP    i q_t + q_xx = 2 q (|q|^2 - 1)        Strang split-step Fourier
//   mKdV  psi_t + psi_xxx - 6 |psi|^2 psi_x = 0  integrating factor + RK4
//   KdV6  u_t - 6 u_x + u_xxx - 6 u u_x = 0      integrating factor + RK4
//
// GP is invariant under x -> -x, so kink data is evolved on its even
// reflection. The odd-order flows are not, and kink data there is written as
// psi = B + b with a fixed tanh background B joining the two boundary values;
// only the decaying b is stepped spectrally.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "gpscatter/error.hpp"
#include "gpscatter/fft.hpp"
#include "gpscatter/field.hpp"

namespace gpscatter {

enum class Equation { gp, mkdv, kdv6, kdv };

inline std::string equation_name(Equation e) {
  switch (e) {
    case Equation::gp: return "gp";
    case Equation::mkdv: return "mkdv";
    case Equation::kdv6: return "kdv6";
    case Equation::kdv: return "kdv";
  }
  return "?";
}

struct Trajectory {
  Equation equation = Equation::gp;
  double dt = 0.0;
  long steps = 0;
  std::vector<double> times;
  std::vector<SampledFunction> states;
  int substeps = 1;
  double stiffness = 0.0;  // h/dx^2 for the GP substep h, the explicit CFL number otherwise
};

struct EvolveOptions {
  int snapshot_every = 0;  // steps between snapshots; 0 keeps only the ends
  double blowup_factor = 10.0;
};

namespace detail {

inline double max_abs(const cvec& v) {
  double m = 0.0;
  for (const auto& x : v) m = std::max(m, std::abs(x));
  return m;
}

inline long step_count(double dt, double t_final) {
  require(std::isfinite(dt) && dt > 0.0, "time step must be positive");
  require(std::isfinite(t_final) && t_final >= 0.0, "final time must be non-negative");
  const double r = t_final / dt;
  const long steps = std::lround(r);
  require(std::abs(r - static_cast<double>(steps)) <= 1e-9 * std::max(1.0, r),
          "final time must be an integer multiple of the time step");
  return steps;
}

[[noreturn]] inline void blowup(double t, double amp) {
  std::ostringstream msg;
  msg << "solution blew up at t = " << t << " (max amplitude " << amp << ")";
  throw NumericalError(msg.str());
}

// Runs `steps` steps of `advance`, snapshotting through `state`.
template <class Advance, class State>
void drive(Trajectory& tr, long steps, double dt, const EvolveOptions& opt, double amp0, Advance&& advance,
           State&& state) {
  const double limit = opt.blowup_factor * std::max(amp0, 1e-300);
  tr.times.push_back(0.0);
  tr.states.push_back(state());
  for (long i = 1; i <= steps; ++i) {
    const double amp = advance();
    const double t = i * dt;
    if (!std::isfinite(amp) || amp > limit) blowup(t, amp);
    if (i == steps || (opt.snapshot_every > 0 && i % opt.snapshot_every == 0)) {
      tr.times.push_back(t);
      tr.states.push_back(state());
    }
  }
  tr.steps = steps;
  tr.dt = dt;
}

}  // namespace detail

/// Strang splitting for GP on the periodic grid or the doubled grid (kinks).
/// Both substeps are exact flows, so the scheme is symmetric: stepping with
/// -dt undoes a step with dt up to rounding.
class GPStepper {
 public:
  explicit GPStepper(const GPField& q0)
      : grid_(q0.grid()), ext_(q0.samples().ext), u_(detail::extended_values(q0.samples())) {
    const int ne = static_cast<int>(u_.size());
    k2_ = Grid::wavenumbers_for(ne, detail::extended_length(q0.samples()));
    for (auto& k : k2_) k *= k;
  }

  double step(double dt) {
    nonlinear(0.5 * dt);
    cvec F = fft::forward(u_);
    for (std::size_t j = 0; j < F.size(); ++j) F[j] *= std::polar(1.0, -k2_[j] * dt);
    u_ = fft::inverse(F);
    nonlinear(0.5 * dt);
    return detail::max_abs(u_);
  }

  SampledFunction state() const {
    cvec v(u_.begin(), u_.begin() + grid_.n);
    return SampledFunction(grid_, std::move(v), ext_);
  }

  /// The full (possibly doubled) periodic state.
  const cvec& extended() const { return u_; }

 private:
  // i q_t = 2 q (|q|^2 - 1) keeps |q| fixed, so the flow is a pointwise rotation.
  void nonlinear(double h) {
    for (auto& v : u_) v *= std::polar(1.0, -2.0 * h * (std::norm(v) - 1.0));
  }

  Grid grid_;
  Extension ext_;
  cvec u_;
  std::vector<double> k2_;
};

/// Split-step Fourier on a constant background is unstable near the
/// resonances k_max^2 h = m pi; the requested step is split into substeps h
/// with k_max^2 h below this fraction of pi.
inline constexpr double gp_stability_fraction = 0.9;

inline int gp_substeps(const GPField& q0, double dt) {
  const double kmax = std::numbers::pi / q0.grid().dx();
  return std::max(1, static_cast<int>(std::ceil(dt * kmax * kmax / (gp_stability_fraction * std::numbers::pi))));
}

inline Trajectory evolve_gp(const GPField& q0, double dt, double t_final, const EvolveOptions& opt = {}) {
  const long steps = detail::step_count(dt, t_final);
  GPStepper st(q0);
  const int sub = gp_substeps(q0, dt);
  Trajectory tr;
  tr.equation = Equation::gp;
  tr.substeps = sub;
  tr.stiffness = dt / sub / (q0.grid().dx() * q0.grid().dx());
  detail::drive(
      tr, steps, dt, opt, detail::max_abs(st.extended()),
      [&] {
        double amp = 0.0;
        for (int i = 0; i < sub; ++i) amp = st.step(dt / sub);
        return amp;
      },
      [&] { return st.state(); });
  return tr;
}

/// Fixed smooth background joining the boundary values of a kink:
/// B = m + d tanh(x - c), with B_x and B_xxx in closed form.
struct KinkBackground {
  cplx mid{}, half_jump{};
  double center = 0.0;

  static KinkBackground none() { return {}; }
  static KinkBackground for_field(const SampledFunction& f) {
    KinkBackground b;
    b.mid = 0.5 * (f.values.back() + f.values.front());
    b.half_jump = 0.5 * (f.values.back() - f.values.front());
    b.center = f.grid.x0 + 0.5 * f.grid.length;
    return b;
  }
  bool active() const { return half_jump != cplx(0.0); }
  cplx value(double x) const { return mid + half_jump * std::tanh(x - center); }
  cplx d1(double x) const {
    const double s = 1.0 / std::cosh(x - center);
    return half_jump * (s * s);
  }
  cplx d3(double x) const {
    const double s = 1.0 / std::cosh(x - center), t = std::tanh(x - center);
    return half_jump * (4.0 * s * s * t * t - 2.0 * s * s * s * s);
  }
};

/// Integrating-factor RK4 for v_t = i w(k) v + N(v) on a periodic grid,
/// with the 2/3 rule applied to the nonlinear term. `nonlinear` receives
/// physical values and their spectral derivative and returns N in physical
/// space.
class IFRK4 {
 public:
  using Nonlinear = std::function<cvec(const cvec&, const cvec&)>;

  IFRK4(const Grid& g, std::function<double(double)> omega, Nonlinear nl) : grid_(g), nl_(std::move(nl)) {
    k_ = g.wavenumbers();
    omega_.resize(k_.size());
    keep_.resize(k_.size());
    const double kmax = std::abs(k_[g.n / 2]);
    for (std::size_t j = 0; j < k_.size(); ++j) {
      omega_[j] = omega(k_[j]);
      keep_[j] = std::abs(k_[j]) < (2.0 / 3.0) * kmax;
    }
  }

  double kmax() const { return std::abs(k_[grid_.n / 2]); }

  /// Advances the spectrum V by dt.
  void step(cvec& V, double dt) const {
    const std::size_t n = V.size();
    cvec half(n), full(n);
    for (std::size_t j = 0; j < n; ++j) {
      half[j] = std::polar(1.0, omega_[j] * 0.5 * dt);
      full[j] = half[j] * half[j];
    }
    const cvec k1 = rhs(V);
    cvec tmp(n);
    for (std::size_t j = 0; j < n; ++j) tmp[j] = half[j] * (V[j] + 0.5 * dt * k1[j]);
    const cvec k2 = rhs(tmp);
    for (std::size_t j = 0; j < n; ++j) tmp[j] = half[j] * V[j] + 0.5 * dt * k2[j];
    const cvec k3 = rhs(tmp);
    for (std::size_t j = 0; j < n; ++j) tmp[j] = full[j] * V[j] + dt * half[j] * k3[j];
    const cvec k4 = rhs(tmp);
    for (std::size_t j = 0; j < n; ++j)
      V[j] = full[j] * V[j] + dt / 6.0 * (full[j] * k1[j] + 2.0 * half[j] * (k2[j] + k3[j]) + k4[j]);
  }

 private:
  cvec rhs(const cvec& V) const {
    cvec D(V.size());
    for (std::size_t j = 0; j < V.size(); ++j)
      D[j] = (static_cast<int>(j) == grid_.n / 2) ? cplx(0.0) : cplx(0.0, k_[j]) * V[j];
    const cvec N = fft::forward(nl_(fft::inverse(V), fft::inverse(D)));
    cvec out(V.size());
    for (std::size_t j = 0; j < V.size(); ++j) out[j] = keep_[j] ? N[j] : cplx(0.0);
    return out;
  }

  Grid grid_;
  Nonlinear nl_;
  std::vector<double> k_, omega_;
  std::vector<bool> keep_;
};

namespace detail {

inline Trajectory evolve_odd_order(Equation eq, const SampledFunction& f0, double dt, double t_final,
                                   const EvolveOptions& opt, bool real_field) {
  const long steps = step_count(dt, t_final);
  const Grid g = f0.grid;
  const KinkBackground bg =
      std::abs(f0.values.back() - f0.values.front()) > 1e-8 ? KinkBackground::for_field(f0) : KinkBackground::none();
  require(eq == Equation::mkdv || !bg.active(), "KdV data must be flat at both ends");

  cvec B(g.n, 0.0), Bx(g.n, 0.0), Bxxx(g.n, 0.0);
  if (bg.active())
    for (int j = 0; j < g.n; ++j) {
      B[j] = bg.value(g.x(j));
      Bx[j] = bg.d1(g.x(j));
      Bxxx[j] = bg.d3(g.x(j));
    }

  std::function<double(double)> omega;
  IFRK4::Nonlinear nl;
  switch (eq) {
    case Equation::mkdv:
      omega = [](double k) { return k * k * k; };
      nl = [&](const cvec& b, const cvec& bx) {
        cvec out(b.size());
        for (std::size_t j = 0; j < b.size(); ++j) {
          const cplx psi = B[j] + b[j];
          out[j] = 6.0 * std::norm(psi) * (Bx[j] + bx[j]) - Bxxx[j];
        }
        return out;
      };
      break;
    case Equation::kdv6:
    case Equation::kdv: {
      const double drift = eq == Equation::kdv6 ? 6.0 : 0.0;
      omega = [drift](double k) { return k * k * k + drift * k; };
      nl = [](const cvec& u, const cvec& ux) {
        cvec out(u.size());
        for (std::size_t j = 0; j < u.size(); ++j) out[j] = 6.0 * u[j] * ux[j];
        return out;
      };
      break;
    }
    case Equation::gp:
      throw InvalidArgument("GP is not an odd-order flow");
  }

  IFRK4 scheme(g, omega, nl);
  cvec b0(g.n);
  for (int j = 0; j < g.n; ++j) b0[j] = f0.values[j] - B[j];
  cvec V = fft::forward(b0);

  auto physical = [&] {
    cvec b = fft::inverse(V);
    for (int j = 0; j < g.n; ++j) {
      b[j] += B[j];
      if (real_field) b[j] = b[j].real();
    }
    return b;
  };

  const double amp0 = max_abs(f0.values);
  Trajectory tr;
  tr.equation = eq;
  // RK4 is stable on the imaginary axis up to 2.8; the transport speed of the
  // nonlinear term is 6|psi|^2 (mKdV) or 6|u| (KdV).
  const double speed = eq == Equation::mkdv ? 6.0 * amp0 * amp0 : 6.0 * amp0;
  tr.stiffness = speed * scheme.kmax() * dt;
  if (tr.stiffness > 2.8) {
    std::ostringstream msg;
    msg << "time step violates the explicit stability limit (CFL number " << tr.stiffness << " > 2.8)";
    throw NumericalError(msg.str());
  }
  drive(
      tr, steps, dt, opt, amp0,
      [&] {
        scheme.step(V, dt);
        if (real_field) {
          // keep the spectrum Hermitian so rounding cannot grow an imaginary part
          cvec u = fft::inverse(V);
          for (auto& x : u) x = x.real();
          V = fft::forward(u);
        }
        return max_abs(physical());
      },
      [&] { return SampledFunction(g, physical(), f0.ext); });
  return tr;
}

}  // namespace detail

inline Trajectory evolve_mkdv(const GPField& psi0, double dt, double t_final, const EvolveOptions& opt = {}) {
  return detail::evolve_odd_order(Equation::mkdv, psi0.samples(), dt, t_final, opt, false);
}

inline Trajectory evolve_kdv6(const SampledFunction& u0, double dt, double t_final, const EvolveOptions& opt = {}) {
  for (const auto& v : u0.values) require(v.imag() == 0.0, "KdV data must be real");
  return detail::evolve_odd_order(Equation::kdv6, u0, dt, t_final, opt, true);
}

/// Standard KdV u_t + u_xxx - 6 u u_x = 0, for the Galilean cross-check.
inline Trajectory evolve_kdv(const SampledFunction& u0, double dt, double t_final, const EvolveOptions& opt = {}) {
  for (const auto& v : u0.values) require(v.imag() == 0.0, "KdV data must be real");
  return detail::evolve_odd_order(Equation::kdv, u0, dt, t_final, opt, true);
}

struct Observable {
  std::string name;
  std::function<double(const GPField&)> fn;
};

struct DriftRow {
  double t = 0.0;
  std::string observable;
  double value = 0.0;
  double rel_drift = 0.0;
};

struct DriftTable {
  std::vector<DriftRow> rows;
  std::vector<std::pair<std::string, double>> max_drift;  // per observable, in registration order

  double max_for(const std::string& name) const {
    for (const auto& [n, d] : max_drift)
      if (n == name) return d;
    throw InvalidArgument("unknown observable '" + name + "'");
  }
};

/// Evaluates each observable on every snapshot; drift is
/// |O(t) - O(0)| / max(|O(0)|, 1).
inline DriftTable conservation_monitor(const Trajectory& tr, const std::vector<Observable>& obs,
                                       FieldTolerance tol = {}) {
  DriftTable out;
  std::vector<double> first(obs.size()), worst(obs.size(), 0.0);
  for (std::size_t i = 0; i < tr.states.size(); ++i) {
    const GPField q(tr.states[i], tol);
    for (std::size_t k = 0; k < obs.size(); ++k) {
      const double v = obs[k].fn(q);
      if (i == 0) first[k] = v;
      const double d = std::abs(v - first[k]) / std::max(std::abs(first[k]), 1.0);
      worst[k] = std::max(worst[k], d);
      out.rows.push_back({tr.times[i], obs[k].name, v, d});
    }
  }
  for (std::size_t k = 0; k < obs.size(); ++k) out.max_drift.emplace_back(obs[k].name, worst[k]);
  return out;
}

/// Steps forward by dt then back by -dt `steps` times; returns the max-norm
/// distance to the initial state.
inline double gp_reversibility_error(const GPField& q0, double dt, int steps) {
  GPStepper st(q0);
  for (int i = 0; i < steps; ++i) st.step(dt);
  for (int i = 0; i < steps; ++i) st.step(-dt);
  const auto back = st.state();
  double err = 0.0;
  for (int j = 0; j < q0.grid().n; ++j) err = std::max(err, std::abs(back.values[j] - q0.samples().values[j]));
  return err;
}

/// For kink data, the largest deviation of the doubled GP state from its own
/// reflection after evolving to t_final.
inline double gp_reflection_symmetry_error(const GPField& q0, double dt, double t_final) {
  const long steps = detail::step_count(dt, t_final);
  GPStepper st(q0);
  for (long i = 0; i < steps; ++i) st.step(dt);
  const auto& u = st.extended();
  const std::size_t ne = u.size();
  double err = 0.0;
  for (std::size_t j = 0; j < ne; ++j) err = std::max(err, std::abs(u[j] - u[ne - 1 - j]));
  return err;
}

}  // namespace gpscatter
