#pragma once

// Spectral side of the Lax operator: points (lambda, z, zeta) of the upper
// sheet lambda^2 - z^2 = 1, the renormalised Jost problem, the transmission
// coefficient T_c^{-1}, bound states on (-1, 1), and a Neumann-series solve
// used as an independent oracle.
//
// Two integration routes are available.
//  * w-form: w' = [[0, q2], [q3, 2iz + q4]] w, w(-inf) = (1, 0), and
//    T_c^{-1} = e^Phi w^1(+inf). Used off the cut, where |q|^2 - zeta^2 never
//    vanishes. The deviation w - (1, 0) is integrated so that small
//    T_c^{-1} - 1 keep full relative accuracy.
//  * u-form: the Lax system u' = [[-i lambda, q], [conj q, i lambda]] u itself,
//    started on the decaying eigenvector at the left edge and projected on the
//    right-edge eigenvectors. Its coefficients have no poles, so it is the
//    route on the cut, where the w-form denominators can vanish. It yields
//    the classical T^{-1}; the renormalisation phase is applied afterwards.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "gpscatter/error.hpp"
#include "gpscatter/field.hpp"
#include "gpscatter/grid.hpp"
#include "gpscatter/magnus.hpp"
#include "gpscatter/parallel.hpp"

namespace gpscatter {

inline constexpr cplx I_{0.0, 1.0};

// ---------------------------------------------------------------------------
// Riemann surface

enum class PointKind { imag_axis, cut, generic };

struct SpectralPoint {
  cplx lambda;
  cplx z;
  cplx zeta;
  PointKind kind = PointKind::generic;
  double tau = 0.0;  // imag_axis only
  double xi = 0.0;   // cut only
  int sign = 1;      // imag_axis and cut: which of +-
};

/// Generic point from lambda off the cut; z = sqrt(lambda^2 - 1), Im z > 0.
inline SpectralPoint surface_point(cplx lambda) {
  require(std::isfinite(lambda.real()) && std::isfinite(lambda.imag()), "lambda must be finite");
  require(!(lambda.imag() == 0.0 && std::abs(lambda.real()) >= 1.0),
          "lambda lies on the cut (-inf,-1] U [1,inf); use cut_point");
  cplx z = std::sqrt(lambda - 1.0) * std::sqrt(lambda + 1.0);
  if (z.imag() < 0.0) z = -z;
  return {lambda, z, lambda + z, PointKind::generic};
}

/// lambda = +-i sigma, z = i tau/2, sigma = sqrt(tau^2/4 - 1).
inline SpectralPoint imag_axis_point(double tau, int sign = 1) {
  require(std::isfinite(tau) && tau >= 2.0, "imaginary-axis points need tau >= 2");
  require(sign == 1 || sign == -1, "sign must be +1 or -1");
  const double sigma = std::sqrt(std::max(0.0, tau * tau / 4.0 - 1.0));
  const double omega = tau / 2.0 + sign * sigma;
  return {cplx(0.0, sign * sigma), cplx(0.0, tau / 2.0), cplx(0.0, omega), PointKind::imag_axis, tau, 0.0, sign};
}

/// Boundary value on the cut: z = xi/2, lambda = sign sqrt(xi^2/4 + 1).
inline SpectralPoint cut_point(double xi, int sign = 1) {
  require(std::isfinite(xi), "xi must be finite");
  require(sign == 1 || sign == -1, "sign must be +1 or -1");
  const double lam = sign * std::sqrt(xi * xi / 4.0 + 1.0);
  return {cplx(lam), cplx(xi / 2.0), cplx(lam + xi / 2.0), PointKind::cut, 0.0, xi, sign};
}

// ---------------------------------------------------------------------------
// Coefficients

struct CoefficientValues {
  cplx q1, q2, q3, q4;
  cplx denominator;
};

inline CoefficientValues coefficients_at(cplx q, cplx dq, cplx zeta) {
  const double m2 = std::norm(q);
  const double a = m2 - 1.0;
  const cplx D = m2 - zeta * zeta;
  const cplx iz = I_ * zeta;
  return {(iz * a - std::conj(q) * dq) / D, (iz * dq + a * q) / D, (-iz * std::conj(dq) + a * std::conj(q)) / D,
          (2.0 * iz * a + q * std::conj(dq) - std::conj(q) * dq) / D, D};
}

struct CoefficientFields {
  SampledFunction q1, q2, q3, q4;
  SampledFunction phase;  // 2izx + int_{x0}^x q4
  double min_denominator = 0.0;
};

inline CoefficientFields coefficient_fields(const GPField& field, const SpectralPoint& pt) {
  const auto& q = field.samples();
  const auto& dq = field.derivative();
  const Grid& g = q.grid;
  cvec c1(g.n), c2(g.n), c3(g.n), c4(g.n);
  double dmin = std::numeric_limits<double>::infinity();
  for (int j = 0; j < g.n; ++j) {
    auto c = coefficients_at(q[j], dq[j], pt.zeta);
    c1[j] = c.q1;
    c2[j] = c.q2;
    c3[j] = c.q3;
    c4[j] = c.q4;
    dmin = std::min(dmin, std::abs(c.denominator));
  }
  if (pt.kind == PointKind::cut && dmin < 1e-6)
    throw NumericalError("coefficient denominator |q|^2 - zeta^2 nearly vanishes on the cut (min " +
                         std::to_string(dmin) + ")");
  CoefficientFields out{SampledFunction(g, c1), SampledFunction(g, c2), SampledFunction(g, c3),
                        SampledFunction(g, c4), {}, dmin};
  auto integral = cumulative_integral(out.q4);
  for (int j = 0; j < g.n; ++j) integral.values[j] += 2.0 * I_ * pt.z * g.x(j);
  out.phase = std::move(integral);
  return out;
}

// ---------------------------------------------------------------------------
// Solvers

struct SolveOptions {
  int initial_refinement = 4;
  int max_refinement = 256;
  double rtol = 1e-10;  // relative to the size of the computed deviation
  double atol = 1e-15;
};

struct SolveInfo {
  int refinement = 0;  // final band-limited refinement factor of the base grid
  long steps = 0;      // Magnus steps over all attempted refinements
  double error_estimate = 0.0;
};

struct JostResult {
  cplx w_inf;  // w^1 at the right edge
  cplx delta;  // w_inf - 1, carried separately for accuracy
  SolveInfo info;
};

enum class Route { w_form, u_form, w_form_mirror };

struct Transmission {
  cplx value;      // T_c^{-1}
  cplx log_value;  // ln T_c^{-1}, principal branch of each factor
  Route route = Route::w_form;
  SolveInfo info;
};

struct NeumannResult {
  std::vector<cplx> partial_sums;  // of w^1(+inf): 1, 1 + T_2, 1 + T_2 + T_4, ...
  double tail_estimate = 0.0;      // modulus of the last increment
  bool smallness_warning = false;  // surrogate smallness above the configured threshold
  double surrogate = 0.0;
  int refinement = 0;
};

namespace detail {

inline cplx log1p(cplx d) {
  const double re = 0.5 * std::log1p(2.0 * d.real() + std::norm(d));
  return {re, std::atan2(d.imag(), 1.0 + d.real())};
}

inline int refinement_for_point(const Grid& g, const SpectralPoint& pt, int r0) {
  // Keep |z| h moderate so the Magnus remainder is in its asymptotic regime.
  const double scale = std::max(1.0, std::abs(pt.z));
  int r = std::max(1, r0);
  while (2.0 * g.dx() / r * scale > 0.5) r *= 2;
  return r;
}

// Cubic midpoint interpolation on equispaced samples.
inline cplx midpoint(const std::vector<cplx>& f, std::size_t k) {
  const std::size_t n = f.size();
  if (k == 0) return (3.0 * f[0] + 6.0 * f[1] - f[2]) / 8.0;
  if (k + 2 >= n) return (3.0 * f[k + 1] + 6.0 * f[k] - f[k - 1]) / 8.0;
  return (-f[k - 1] + 9.0 * f[k] + 9.0 * f[k + 1] - f[k + 2]) / 16.0;
}

}  // namespace detail

/// Evaluates the scattering quantities of one field. Refined samples of q and
/// q' are cached per refinement factor and shared across threads, so one
/// solver serves a whole list of spectral points.
class JostSolver {
 public:
  static constexpr double w_form_min_denominator = 0.25;
  static constexpr double u_form_rounding_floor = 1e-12;

  explicit JostSolver(GPField field, SolveOptions opt = {})
      : field_(std::move(field)), opt_(opt), cache_(std::make_shared<Cache>()) {
    auto mp = mass_momentum(field_);
    mass_ = mp.mass;
    momentum_ = mp.momentum;
  }

  const GPField& field() const { return field_; }
  const SolveOptions& options() const { return opt_; }
  double mass() const { return mass_; }
  double momentum() const { return momentum_; }

  /// Phi = -(i/2z) int a^2/D + (1/(2 z zeta)) int conj(q) q' a / D.
  cplx phi_correction(const SpectralPoint& pt) const {
    require(std::abs(pt.z) > 0.0, "phi_correction is singular at z = 0");
    const auto& q = field_.samples();
    const auto& dq = field_.derivative();
    const cplx zeta2 = pt.zeta * pt.zeta;
    std::vector<cplx> s1(q.size()), s2(q.size());
    for (int j = 0; j < q.size(); ++j) {
      const double m2 = std::norm(q[j]);
      const double a = m2 - 1.0;
      const cplx D = m2 - zeta2;
      s1[j] = a * a / D;
      s2[j] = std::conj(q[j]) * dq[j] * a / D;
    }
    const double dx = q.grid.dx();
    const cplx i1 = pairwise_sum(s1) * dx;
    const cplx i2 = pairwise_sum(s2) * dx;
    return -I_ / (2.0 * pt.z) * i1 + i2 / (2.0 * pt.z * pt.zeta);
  }

  /// Renormalised Jost solve (w-form), adaptive in the refinement factor.
  JostResult jost(const SpectralPoint& pt) const {
    SolveInfo info;
    int r = detail::refinement_for_point(field_.grid(), pt, opt_.initial_refinement);
    cplx coarse = w_form_delta(pt, r, info.steps);
    for (;;) {
      const int rf = 2 * r;
      if (rf > opt_.max_refinement)
        throw NumericalError("Jost solve did not converge at lambda = " + format(pt.lambda) +
                             " (error estimate " + fmt(info.error_estimate) + ")");
      const cplx fine = w_form_delta(pt, rf, info.steps);
      // Fourth order: the fine error is about |fine - coarse|/15, and the
      // extrapolated value is better still.
      info.error_estimate = std::abs(fine - coarse) / 15.0;
      info.refinement = rf;
      if (info.error_estimate <= std::max(opt_.rtol * std::abs(fine), opt_.atol)) {
        const cplx best = fine + (fine - coarse) / 15.0;
        return {1.0 + best, best, info};
      }
      coarse = fine;
      r = rf;
    }
  }

  /// Classical T^{-1} from the Lax system (u-form). Valid on and off the cut
  /// (z != 0).
  Transmission lax_classical(const SpectralPoint& pt) const {
    require(std::abs(pt.z) > 0.0, "the Lax route needs z != 0 (cut endpoint excluded)");
    SolveInfo info;
    int r = detail::refinement_for_point(field_.grid(), pt, opt_.initial_refinement);
    cplx coarse = u_form_alpha(pt, r, info.steps);
    for (;;) {
      const int rf = 2 * r;
      if (rf > opt_.max_refinement)
        throw NumericalError("Lax solve did not converge at lambda = " + format(pt.lambda));
      const cplx fine = u_form_alpha(pt, rf, info.steps);
      info.error_estimate = std::abs(fine - coarse) / std::max(std::abs(fine), 1e-300) / 15.0;
      info.refinement = rf;
      if (info.error_estimate <= u_form_tolerance(pt, fine)) {
        const cplx best = fine + (fine - coarse) / 15.0;
        return {best, std::log(best), Route::u_form, info};
      }
      coarse = fine;
      r = rf;
    }
  }

  /// Accepted relative error of T^{-1} in the Lax route. On the cut ln|T| can
  /// vanish (reflectionless data) and rounding sets a floor that grows like
  /// 1/|z| near the endpoints. Off the cut the target is the modulus part of
  /// the renormalised logarithm, which is far smaller than ln T^{-1} itself at
  /// large |z| (its phase may carry a constant from the boundary values).
  double u_form_tolerance(const SpectralPoint& pt, cplx t_inv) const {
    if (pt.kind == PointKind::cut)
      return std::max(opt_.rtol * std::abs(std::log(std::abs(t_inv))), 1e-11 * std::max(1.0, 1.0 / std::abs(pt.z)));
    const double re = std::log(std::abs(t_inv)) + renormalisation_log(pt).real();
    return std::max(opt_.rtol * std::abs(re), u_form_rounding_floor);
  }

  /// ln of the renormalisation factor T_c^{-1} / T^{-1} = e^{-iM/(2z) - iP/(2 z zeta)}.
  cplx renormalisation_log(const SpectralPoint& pt) const {
    return -I_ * mass_ / (2.0 * pt.z) - I_ * momentum_ / (2.0 * pt.z * pt.zeta);
  }

  /// min_x | |q|^2 - zeta^2 |, the distance of the w-form coefficients from a pole.
  double min_denominator(const SpectralPoint& pt) const {
    const cplx zeta2 = pt.zeta * pt.zeta;
    double dmin = std::numeric_limits<double>::infinity();
    for (const auto& v : field_.samples().values) dmin = std::min(dmin, std::abs(std::norm(v) - zeta2));
    return dmin;
  }

  /// T_c^{-1}. The w-form is used where its denominators stay away from zero;
  /// on the cut, and where a small |zeta| meets a dip of |q| (dark solitons on
  /// the lower sheet), the pole-free Lax route is used instead.
  Transmission transmission(const SpectralPoint& pt) const {
    if (pt.kind != PointKind::cut && min_denominator(pt) < w_form_min_denominator) {
      // Swapping the two components maps the Lax system of (lambda, q) to that
      // of (-lambda, conj q) at the same z, and
      //   ln T_c^{-1}(lambda; q) = ln T_c^{-1}(-lambda; conj q) + iP + i arg(conj qL / conj qR).
      // The mirrored point often keeps the w-form away from its poles.
      const SpectralPoint mp = mirrored(pt);
      const JostSolver& m = mirror();
      if (m.min_denominator(mp) >= w_form_min_denominator) {
        auto t = m.transmission(mp);
        // Only the phase of the edge ratio enters; its modulus is 1 in the
        // limit, and on evolved data the sampled edges carry ~1e-12 radiation
        // that would otherwise offset ln|T| by a constant.
        const cplx lg = t.log_value + I_ * momentum_ +
                        I_ * std::arg(std::conj(field_.left_value()) / std::conj(field_.right_value()));
        return {std::exp(lg), lg, Route::w_form_mirror, t.info};
      }
    }
    if (pt.kind == PointKind::cut || min_denominator(pt) < w_form_min_denominator) {
      auto t = lax_classical(pt);
      const cplx lg = t.log_value + renormalisation_log(pt);
      return {std::exp(lg), lg, Route::u_form, t.info};
    }
    auto j = jost(pt);
    const cplx lg = phi_correction(pt) + detail::log1p(j.delta);
    return {std::exp(lg), lg, Route::w_form, j.info};
  }

  /// (-lambda, z): the point of the conjugate field's problem that the
  /// component swap relates to pt.
  static SpectralPoint mirrored(const SpectralPoint& pt) {
    SpectralPoint m = pt;
    m.lambda = -pt.lambda;
    m.zeta = -pt.lambda + pt.z;
    m.sign = -pt.sign;
    return m;
  }

  /// Solver for conj(q), created on first use and shared by copies.
  const JostSolver& mirror() const {
    std::lock_guard lock(cache_->mutex);
    if (!cache_->mirror) {
      auto conj = map_values(field_.samples(), [](cplx v) { return std::conj(v); });
      cache_->mirror = std::make_shared<const JostSolver>(GPField(std::move(conj), field_.tolerance()), opt_);
    }
    return *cache_->mirror;
  }

  /// T_c^{-1} through the Lax route (dual-path check off the cut).
  Transmission transmission_via_lax(const SpectralPoint& pt) const {
    auto t = lax_classical(pt);
    const cplx lg = t.log_value + renormalisation_log(pt);
    return {std::exp(lg), lg, Route::u_form, t.info};
  }

  /// ln T^{-1} = ln T_c^{-1} + iM/(2z) + iP/(2 z zeta).
  cplx classical_log(const SpectralPoint& pt) const {
    return transmission(pt).log_value - renormalisation_log(pt);
  }

  /// Partial sums of the Neumann series for w^1(+inf). Each pair of terms
  /// solves h' = (2iz + q4) h + q3 w^1_prev, then w^1_next = int q2 h, with the
  /// same Magnus scheme as the direct solve.
  NeumannResult neumann_series(const SpectralPoint& pt, int n_max, double smallness_threshold = 0.1) const {
    require(n_max >= 1, "n_max must be >= 1");
    NeumannResult out;
    out.surrogate = surrogate_smallness(field_, 1.0, std::max(2.0, 2.0 * std::abs(pt.z)));
    out.smallness_warning = out.surrogate > smallness_threshold;
    int r = detail::refinement_for_point(field_.grid(), pt, opt_.initial_refinement);
    auto coarse = neumann_at(pt, n_max, r);
    for (;;) {
      const int rf = 2 * r;
      if (rf > opt_.max_refinement) throw NumericalError("Neumann series quadrature did not converge");
      auto fine = neumann_at(pt, n_max, rf);
      const double diff = std::abs(fine.back() - coarse.back());
      if (diff <= std::max(opt_.rtol * std::abs(fine.back() - 1.0), opt_.atol)) {
        out.partial_sums = std::move(fine);
        out.refinement = rf;
        break;
      }
      coarse = std::move(fine);
      r = rf;
    }
    const auto& ps = out.partial_sums;
    out.tail_estimate = ps.size() >= 2 ? std::abs(ps.back() - ps[ps.size() - 2]) : 0.0;
    return out;
  }

 private:
  struct Refined {
    cvec q, dq;
    double dx = 0.0;
  };
  struct Cache {
    std::mutex mutex;
    std::map<int, std::shared_ptr<const Refined>> by_factor;
    std::shared_ptr<const JostSolver> mirror;
  };

  static std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
  }
  static std::string format(cplx v) {
    return "(" + fmt(v.real()) + "," + fmt(v.imag()) + ")";
  }

  std::shared_ptr<const Refined> refined(int r) const {
    std::lock_guard lock(cache_->mutex);
    auto& slot = cache_->by_factor[r];
    if (!slot) {
      auto rq = refine(field_.samples(), r);
      auto rdq = refine(field_.derivative(), r);
      auto p = std::make_shared<Refined>();
      p->q = std::move(rq.values);
      p->dq = std::move(rdq.values);
      p->dx = field_.grid().dx() / r;
      slot = std::move(p);
    }
    return slot;
  }

  magnus::Affine w_generator(cplx q, cplx dq, const SpectralPoint& pt) const {
    auto c = coefficients_at(q, dq, pt.zeta);
    return {{0.0, c.q2, c.q3, 2.0 * I_ * pt.z + c.q4}, {0.0, c.q3}};
  }

  cplx w_form_delta(const SpectralPoint& pt, int r, long& steps) const {
    auto R = refined(r);
    const std::size_t last = R->q.size() - 2;
    const double h = 2.0 * R->dx;
    if (pt.kind == PointKind::cut) {
      for (std::size_t j = 0; j <= last; ++j) {
        if (std::abs(std::norm(R->q[j]) - pt.zeta * pt.zeta) < 1e-6)
          throw NumericalError("w-form denominator vanishes on the cut");
      }
    }
    magnus::Vec2 y{};
    auto A1 = w_generator(R->q[0], R->dq[0], pt);
    for (std::size_t j = 0; j + 2 <= last; j += 2) {
      auto A2 = w_generator(R->q[j + 1], R->dq[j + 1], pt);
      auto A3 = w_generator(R->q[j + 2], R->dq[j + 2], pt);
      y = magnus::step(A1, A2, A3, h)(y);
      A1 = A3;
      if (!(std::abs(y.x) < 1e200 && std::abs(y.y) < 1e200))
        throw NumericalError("Jost solution overflow at x = " +
                             std::to_string(field_.grid().x0 + (j + 2) * R->dx));
    }
    steps += static_cast<long>(last / 2);
    return y.x;
  }

  magnus::Affine u_generator(cplx q, const SpectralPoint& pt) const {
    return {{-I_ * pt.lambda + I_ * pt.z, q, std::conj(q), I_ * pt.lambda + I_ * pt.z}, {0.0, 0.0}};
  }

  // T^{-1} from the Lax system, integrated for e^{iz(x - xL)} u.
  cplx u_form_alpha(const SpectralPoint& pt, int r, long& steps) const {
    auto R = refined(r);
    const std::size_t last = R->q.size() - 2;
    const double h = 2.0 * R->dx;
    const cplx qL = R->q[0];
    const cplx qR = R->q[last];
    magnus::Vec2 y{1.0, I_ * (pt.lambda - pt.z) * std::conj(qL)};
    auto A1 = u_generator(R->q[0], pt);
    for (std::size_t j = 0; j + 2 <= last; j += 2) {
      auto A2 = u_generator(R->q[j + 1], pt);
      auto A3 = u_generator(R->q[j + 2], pt);
      y = magnus::step(A1, A2, A3, h)(y);
      A1 = A3;
      if (!(std::abs(y.x) < 1e200 && std::abs(y.y) < 1e200))
        throw NumericalError("Lax solution overflow at x = " + std::to_string(field_.grid().x0 + (j + 2) * R->dx));
    }
    steps += static_cast<long>(last / 2);
    // y = alpha e_+ + beta f_+, e_+ = (1, i(lambda - z) conj qR), f_+ = (1, i(lambda + z) conj qR).
    const cplx s = y.y / (I_ * std::conj(qR));
    return 0.5 * (y.x + (pt.lambda * y.x - s) / pt.z);
  }

  std::vector<cplx> neumann_at(const SpectralPoint& pt, int n_max, int r) const {
    auto R = refined(r);
    const std::size_t last = R->q.size() - 2;
    const std::size_t nodes = last / 2 + 1;  // even fine nodes
    const double h = 2.0 * R->dx;
    std::vector<magnus::Affine> gen(last + 1);
    std::vector<cplx> q3(last + 1);
    for (std::size_t j = 0; j <= last; ++j) {
      auto c = coefficients_at(R->q[j], R->dq[j], pt.zeta);
      gen[j] = {{2.0 * I_ * pt.z + c.q4, 0.0, c.q2, 0.0}, {0.0, 0.0}};
      q3[j] = c.q3;
    }
    std::vector<cplx> src(nodes, 1.0);  // w^1 of the previous even term at even nodes
    std::vector<cplx> sums{1.0};
    cplx total = 1.0;
    double prev_inc = std::numeric_limits<double>::infinity();
    int growth = 0;
    for (int term = 1; term <= n_max; ++term) {
      std::vector<cplx> next(nodes);
      magnus::Vec2 y{};  // (h, W)
      next[0] = 0.0;
      auto with_src = [&](std::size_t j, cplx s) {
        auto g = gen[j];
        g.c.x = q3[j] * s;
        return g;
      };
      auto A1 = with_src(0, src[0]);
      for (std::size_t k = 0; k + 1 < nodes; ++k) {
        const std::size_t j = 2 * k;
        auto A2 = with_src(j + 1, detail::midpoint(src, k));
        auto A3 = with_src(j + 2, src[k + 1]);
        y = magnus::step(A1, A2, A3, h)(y);
        A1 = A3;
        next[k + 1] = y.y;
      }
      const cplx inc = next.back();
      total += inc;
      sums.push_back(total);
      const double ainc = std::abs(inc);
      if (ainc > prev_inc && ainc > 1e-12) {
        if (++growth >= 2)
          throw NumericalError("Neumann series diverges (increments growing); the field violates the smallness "
                               "condition for this spectral point");
      } else {
        growth = 0;
      }
      prev_inc = ainc;
      src = std::move(next);
    }
    return sums;
  }

  GPField field_;
  SolveOptions opt_;
  std::shared_ptr<Cache> cache_;
  double mass_ = 0.0;
  double momentum_ = 0.0;
};

// Free-function forms.

inline cplx phi_correction(const GPField& q, const SpectralPoint& pt) { return JostSolver(q).phi_correction(pt); }
inline JostResult jost_solve(const GPField& q, const SpectralPoint& pt, SolveOptions opt = {}) {
  return JostSolver(q, opt).jost(pt);
}
inline Transmission transmission(const GPField& q, const SpectralPoint& pt, SolveOptions opt = {}) {
  return JostSolver(q, opt).transmission(pt);
}
inline NeumannResult neumann_series(const GPField& q, const SpectralPoint& pt, int n_max) {
  return JostSolver(q).neumann_series(pt, n_max);
}

// ---------------------------------------------------------------------------
// Bound states

struct Eigenvalue {
  double lambda;
  double z_im;  // z_m = i z_im, z_im = sqrt(1 - lambda^2)
  double slope;  // of the phase-aligned real part at the root
};

struct EigenReport {
  std::vector<Eigenvalue> eigenvalues;
  double aligned_phase = 0.0;    // constant phase of T_c^{-1} on (-1, 1)
  double max_imag_residue = 0.0;  // largest |Im| after alignment, relative to max |T_c^{-1}|
  bool unresolved_near_edge = false;
  int evaluations = 0;
};

/// Zeros of T_c^{-1} on (-1 + delta, 1 - delta). On that interval T_c^{-1} has a
/// constant phase, so the scan looks for sign changes of its real part after
/// rotating by the phase measured at the largest sample, then bisects.
inline EigenReport eigenvalues(const JostSolver& solver, int grid_density = 200, double delta = 1e-3,
                               double tol = 1e-10) {
  require(grid_density >= 4, "eigenvalue scan needs at least 4 points");
  require(delta > 0.0 && delta < 0.5, "delta must lie in (0, 0.5)");
  EigenReport rep;
  const double lo = -1.0 + delta, hi = 1.0 - delta;
  std::vector<double> lam(grid_density);
  for (int i = 0; i < grid_density; ++i) lam[i] = lo + (hi - lo) * i / (grid_density - 1);
  auto vals = parallel_map<cplx>(lam.size(), [&](std::size_t i) {
    return solver.transmission(surface_point(cplx(lam[i], 0.0))).value;
  });
  rep.evaluations = grid_density;
  std::size_t imax = 0;
  double vmax = 0.0;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (std::abs(vals[i]) > vmax) {
      vmax = std::abs(vals[i]);
      imax = i;
    }
  }
  if (vmax == 0.0) throw NumericalError("transmission vanishes identically on (-1, 1)");
  const double theta = std::arg(vals[imax]);
  rep.aligned_phase = theta;
  const cplx rot = std::polar(1.0, -theta);
  std::vector<double> g(vals.size());
  for (std::size_t i = 0; i < vals.size(); ++i) {
    const cplx a = rot * vals[i];
    g[i] = a.real();
    rep.max_imag_residue = std::max(rep.max_imag_residue, std::abs(a.imag()) / vmax);
  }
  if (std::abs(g.front()) < 1e-6 * vmax || std::abs(g.back()) < 1e-6 * vmax) rep.unresolved_near_edge = true;

  auto aligned = [&](double l) { return (rot * solver.transmission(surface_point(cplx(l, 0.0))).value).real(); };
  for (std::size_t i = 0; i + 1 < g.size(); ++i) {
    if (g[i] == 0.0) {
      rep.eigenvalues.push_back({lam[i], std::sqrt(1.0 - lam[i] * lam[i]), 0.0});
      continue;
    }
    if (g[i] * g[i + 1] >= 0.0) continue;
    double a = lam[i], b = lam[i + 1], ga = g[i], gb = g[i + 1];
    while (b - a > tol) {
      const double m = 0.5 * (a + b);
      const double gm = aligned(m);
      ++rep.evaluations;
      if (gm == 0.0) {
        a = b = m;
        break;
      }
      if ((gm < 0.0) == (ga < 0.0)) {
        a = m;
        ga = gm;
      } else {
        b = m;
        gb = gm;
      }
    }
    const double root = 0.5 * (a + b);
    const double slope = b > a ? (gb - ga) / (b - a) : 0.0;
    rep.eigenvalues.push_back({root, std::sqrt(1.0 - root * root), slope});
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Batch evaluation

struct CutSample {
  double xi;
  cplx plus;   // T_c^{-1} at lambda = +sqrt(xi^2/4 + 1)
  cplx minus;  // at lambda = -sqrt(xi^2/4 + 1)
};

struct AxisSample {
  double tau;
  cplx log_plus;   // ln T_c^{-1}(+i sigma)
  cplx log_minus;  // ln T_c^{-1}(-i sigma)
};

struct ScatteringData {
  std::vector<CutSample> cut;
  std::vector<AxisSample> imag_axis;
  std::optional<EigenReport> eigen;
  long ode_steps = 0;
};

inline std::vector<CutSample> cut_samples(const JostSolver& solver, const std::vector<double>& xis) {
  return parallel_map<CutSample>(xis.size(), [&](std::size_t i) {
    const double xi = xis[i];
    require(xi != 0.0, "xi = 0 is the cut endpoint, where z = 0");
    return CutSample{xi, solver.transmission(cut_point(xi, 1)).value, solver.transmission(cut_point(xi, -1)).value};
  });
}

inline std::vector<AxisSample> axis_samples(const JostSolver& solver, const std::vector<double>& taus) {
  return parallel_map<AxisSample>(taus.size(), [&](std::size_t i) {
    const double tau = taus[i];
    return AxisSample{tau, solver.transmission(imag_axis_point(tau, 1)).log_value,
                      solver.transmission(imag_axis_point(tau, -1)).log_value};
  });
}

}  // namespace gpscatter
