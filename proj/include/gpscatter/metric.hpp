#pragma once

// The gauge-invariant distance on the energy space:
//
//   d^s(p, q)^2 = int_R inf_{|l|=1} || sech(. - y) (l p - q) ||^2_{H^s} dy.
//
// For fixed y the infimum is attained at l = conj(mu)/|mu| with
// mu = <w p, w q>_{H^s}, w = sech(. - y). The minimiser is used to evaluate
// the norm directly, so nearly gauge-equivalent fields do not lose digits to
// the cancellation in |wp|^2 + |wq|^2 - 2|mu|.
//
// The weighted products are transformed on their even reflection, which is
// continuous across the box edges even for kink data.

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

#include "gpscatter/error.hpp"
#include "gpscatter/fft.hpp"
#include "gpscatter/field.hpp"
#include "gpscatter/parallel.hpp"

namespace gpscatter {

struct MetricOptions {
  double y_spacing = 0.25;  // outer trapezoid spacing, in weight widths
  double edge_pad = 5.0;    // y stays this far inside the box
  double max_tail_fraction = 0.01;
};

struct PhaseDistance {
  double distance = 0.0;     // direct norm at the optimal phase
  double closed_form = 0.0;  // sqrt(|wp|^2 + |wq|^2 - 2|mu|)
  cplx mu{};
  cplx phase{1.0, 0.0};  // optimal l multiplying p
};

struct MetricResult {
  double distance = 0.0;
  double tail_estimate = 0.0;
  int y_nodes = 0;
};

namespace detail {

inline cvec weighted_spectrum(const SampledFunction& f, double y) {
  const int n = f.size();
  cvec e(2 * n);
  for (int j = 0; j < n; ++j) {
    const cplx v = f.values[j] / std::cosh(f.grid.x(j) - y);
    e[j] = v;
    e[2 * n - 1 - j] = v;
  }
  return fft::forward(e);
}

// H^s weights on the doubled grid; the factor makes sum w |F|^2 equal to
// ||f||^2 over one copy of the box.
inline std::vector<double> doubled_weights(const Grid& g, double s) {
  const int ne = 2 * g.n;
  auto k = Grid::wavenumbers_for(ne, 2.0 * g.length);
  std::vector<double> w(ne);
  const double dx = g.dx();
  const double norm = 0.5 * dx * dx / (2.0 * g.length);
  for (int j = 0; j < ne; ++j) w[j] = norm * (s == 0.0 ? 1.0 : std::pow(1.0 + k[j] * k[j], s));
  return w;
}

inline PhaseDistance phase_distance(const SampledFunction& p, const SampledFunction& q, double y,
                                    const std::vector<double>& w) {
  const cvec P = weighted_spectrum(p, y);
  const cvec Q = weighted_spectrum(q, y);
  double pp = 0.0, qq = 0.0;
  cplx mu = 0.0;
  for (std::size_t j = 0; j < P.size(); ++j) {
    pp += w[j] * std::norm(P[j]);
    qq += w[j] * std::norm(Q[j]);
    mu += w[j] * P[j] * std::conj(Q[j]);
  }
  PhaseDistance out;
  out.mu = mu;
  out.closed_form = std::sqrt(std::max(0.0, pp + qq - 2.0 * std::abs(mu)));
  out.phase = std::abs(mu) > 0.0 ? std::conj(mu) / std::abs(mu) : cplx(1.0);
  double d2 = 0.0;
  for (std::size_t j = 0; j < P.size(); ++j) d2 += w[j] * std::norm(out.phase * P[j] - Q[j]);
  out.distance = std::sqrt(d2);
  return out;
}

}  // namespace detail

inline PhaseDistance weighted_phase_distance(const GPField& p, const GPField& q, double y, double s) {
  require(p.grid() == q.grid(), "fields must share a grid");
  require(s >= 0.0, "metric exponent must be non-negative");
  return detail::phase_distance(p.samples(), q.samples(), y, detail::doubled_weights(p.grid(), s));
}

/// Brute-force infimum: scan `count` equispaced phases, then polish the best
/// one by golden-section search inside its grid cell.
inline double phase_grid_distance(const GPField& p, const GPField& q, double y, double s, int count) {
  require(count >= 3, "phase grid needs at least three points");
  const auto w = detail::doubled_weights(p.grid(), s);
  const cvec P = detail::weighted_spectrum(p.samples(), y);
  const cvec Q = detail::weighted_spectrum(q.samples(), y);
  auto d2 = [&](double alpha) {
    const cplx l = std::polar(1.0, alpha);
    double acc = 0.0;
    for (std::size_t j = 0; j < P.size(); ++j) acc += w[j] * std::norm(l * P[j] - Q[j]);
    return acc;
  };
  const double step = 2.0 * std::numbers::pi / count;
  int best = 0;
  double best_val = std::numeric_limits<double>::infinity();
  for (int m = 0; m < count; ++m)
    if (const double v = d2(m * step); v < best_val) {
      best_val = v;
      best = m;
    }
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = (best - 1) * step, b = (best + 1) * step;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = d2(c), fd = d2(d);
  while (b - a > 1e-12) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = d2(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = d2(d);
    }
  }
  return std::sqrt(std::max(0.0, std::min({best_val, fc, fd})));
}

inline std::vector<double> metric_y_nodes(const Grid& g, const MetricOptions& opt = {}) {
  const double pad = std::min(opt.edge_pad, 0.25 * g.length);
  const double a = g.x0 + pad, b = g.x_end() - pad;
  const int m = static_cast<int>(std::ceil((b - a) / opt.y_spacing));
  std::vector<double> y(m + 1);
  for (int i = 0; i <= m; ++i) y[i] = a + (b - a) * i / m;
  return y;
}

/// d^s(p, q) with a tail estimate from the e^{-2|y|} decay of the squared
/// integrand beyond the y-range.
inline MetricResult metric_distance(const GPField& p, const GPField& q, double s, const MetricOptions& opt = {}) {
  require(p.grid() == q.grid(), "fields must share a grid");
  require(s >= 0.0, "metric exponent must be non-negative");
  const auto y = metric_y_nodes(p.grid(), opt);
  const auto w = detail::doubled_weights(p.grid(), s);
  auto d = parallel_map<double>(y.size(), [&](std::size_t i) {
    return detail::phase_distance(p.samples(), q.samples(), y[i], w).distance;
  });
  const double h = y[1] - y[0];
  std::vector<double> terms(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) terms[i] = d[i] * d[i] * ((i == 0 || i + 1 == y.size()) ? 0.5 * h : h);
  const double integral = pairwise_sum(terms);
  const double tail = 0.5 * (d.front() * d.front() + d.back() * d.back());
  MetricResult out;
  out.distance = std::sqrt(integral + tail);
  out.tail_estimate = tail;
  out.y_nodes = static_cast<int>(y.size());
  if (tail > opt.max_tail_fraction * (integral + tail) && integral + tail > 1e-24)
    throw NumericalError("metric y-tail estimate exceeds 1% of the result; enlarge the box");
  return out;
}

}  // namespace gpscatter
