#pragma once

// The Gross-Pitaevskii field q with |q| -> 1 at both ends, its derived pair
// (|q|^2 - 1, q'), the energy norms E^s_tau, and the classical conserved
// functionals.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "gpscatter/error.hpp"
#include "gpscatter/grid.hpp"

namespace gpscatter {

enum class BoundaryKind { flat, kink };

struct FieldTolerance {
  double decay = 1e-8;            // bound on |q|^2-1 and |q'| in the margins
  double margin_fraction = 0.05;  // width of each margin as a fraction of n
  double flat_match = 1e-8;       // |q(left) - q(right)| below this means flat
};

class GPField {
 public:
  explicit GPField(SampledFunction q, FieldTolerance tol = {}) : tol_(tol) {
    require(std::all_of(q.values.begin(), q.values.end(),
                        [](cplx v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }),
            "field samples must be finite");
    const cplx left = q.values.front();
    const cplx right = q.values.back();
    kind_ = std::abs(left - right) <= tol.flat_match ? BoundaryKind::flat : BoundaryKind::kink;
    q.ext = kind_ == BoundaryKind::flat ? Extension::periodic : Extension::even;
    q_ = std::move(q);
    dq_ = spectral_derivative(q_, 1);
    const double a_edge = edge_max_abs(map_values(q_, [](cplx v) { return cplx(std::norm(v) - 1.0); }),
                                       tol.margin_fraction);
    const double b_edge = edge_max_abs(dq_, tol.margin_fraction);
    if (a_edge > tol.decay || b_edge > tol.decay) {
      std::ostringstream msg;
      msg << "field is not boundary-flat: max ||q|^2-1| = " << a_edge << ", max |q'| = " << b_edge
          << " in the outer " << tol.margin_fraction * 100 << "% (limit " << tol.decay << ")";
      throw InvalidArgument(msg.str());
    }
  }

  const SampledFunction& samples() const { return q_; }
  const SampledFunction& derivative() const { return dq_; }
  const Grid& grid() const { return q_.grid; }
  BoundaryKind boundary_kind() const { return kind_; }
  const FieldTolerance& tolerance() const { return tol_; }
  cplx left_value() const { return q_.values.front(); }
  cplx right_value() const { return q_.values.back(); }

  SampledFunction second_derivative() const { return spectral_derivative(q_, 2); }

  /// e^{i alpha} q, the same point of the energy space.
  GPField rotated(double alpha) const {
    const cplx ph = std::polar(1.0, alpha);
    return GPField(map_values(q_, [ph](cplx v) { return ph * v; }), tol_);
  }

 private:
  SampledFunction q_;
  SampledFunction dq_;
  BoundaryKind kind_ = BoundaryKind::flat;
  FieldTolerance tol_;
};

struct DerivedPair {
  SampledFunction a;  // |q|^2 - 1, real-valued
  SampledFunction b;  // q'
};

inline DerivedPair derived_pair(const GPField& q) {
  auto a = map_values(q.samples(), [](cplx v) { return cplx(std::norm(v) - 1.0, 0.0); });
  a.ext = Extension::periodic;
  auto b = q.derivative();
  b.ext = Extension::periodic;
  return {std::move(a), std::move(b)};
}

/// E^s_tau(q) = ||(|q|^2-1, q')||_{H^{s-1}_tau}.
inline double energy_norm(const GPField& q, double s, double tau) {
  require(tau > 0.0, "tau must be positive");
  auto p = derived_pair(q);
  const double na = sobolev_norm(p.a, s - 1.0, tau);
  const double nb = sobolev_norm(p.b, s - 1.0, tau);
  return std::sqrt(na * na + nb * nb);
}

/// Sobolev stand-in for (1/tau)||q||_{l^2_tau DU^2}: tau^{-1/2-s} E^s_tau,
/// the majorant that the atomic-space bound reduces to.
inline double surrogate_smallness(const GPField& q, double s, double tau) {
  return std::pow(tau, -0.5 - s) * energy_norm(q, s, tau);
}

struct MassMomentum {
  double mass = 0.0;
  double momentum = 0.0;
  bool marginal = false;  // decay margin close to the tolerance limit
};

inline MassMomentum mass_momentum(const GPField& q) {
  const auto& v = q.samples().values;
  const auto& d = q.derivative().values;
  const double dx = q.grid().dx();
  double m = 0.0, p = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j) {
    m += std::norm(v[j]) - 1.0;
    p += std::imag(v[j] * std::conj(d[j]));
  }
  // |q|^2-1 is integrated over the box only; flag fields whose tails could
  // still carry mass at the 1e-8 level.
  auto p2 = derived_pair(q);
  const double edge = std::max(edge_max_abs(p2.a, 0.01), edge_max_abs(p2.b, 0.01));
  return {m * dx, p * dx, edge > 0.1 * q.tolerance().decay};
}

/// E_GL = 1/2 int ((|q|^2-1)^2 + |q'|^2).
inline double ginzburg_landau(const GPField& q) {
  const auto& v = q.samples().values;
  const auto& d = q.derivative().values;
  double acc = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j) {
    const double a = std::norm(v[j]) - 1.0;
    acc += a * a + std::norm(d[j]);
  }
  return 0.5 * acc * q.grid().dx();
}

/// H^3 = Im int (q' conj(q'') + 3(|q|^2-1) q conj(q')) - P.
inline double hamiltonian_h3(const GPField& q) {
  const auto& v = q.samples().values;
  const auto& d = q.derivative().values;
  const auto dd = q.second_derivative();
  double acc = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j) {
    const double a = std::norm(v[j]) - 1.0;
    acc += std::imag(d[j] * std::conj(dd.values[j]) + 3.0 * a * v[j] * std::conj(d[j]));
  }
  return acc * q.grid().dx() - mass_momentum(q).momentum;
}

/// 2-variation sup_partitions (sum |v(t_{k+1}) - v(t_k)|^2)^{1/2} over
/// subsequences of the samples, with v(infinity) = 0 appended when asked.
/// O(n^2) dynamic programme: best[j] is the largest sum over chains ending at j.
inline double two_variation(std::span<const cplx> v, bool append_terminal_zero = true) {
  require(v.size() <= 2000, "two_variation is a diagnostic for at most 2000 samples");
  std::vector<cplx> seq(v.begin(), v.end());
  if (append_terminal_zero) seq.push_back(0.0);
  const std::size_t n = seq.size();
  std::vector<double> best(n, 0.0);
  double result = 0.0;
  for (std::size_t j = 1; j < n; ++j) {
    for (std::size_t i = 0; i < j; ++i) best[j] = std::max(best[j], best[i] + std::norm(seq[j] - seq[i]));
    result = std::max(result, best[j]);
  }
  return std::sqrt(result);
}

// ---------------------------------------------------------------------------
// Presets (the CLI's --init vocabulary).

/// Dark soliton i sin(phi) + cos(phi) tanh(cos(phi) (x - x_c)).
inline cplx dark_soliton_value(double phi, double x, double x_c = 0.0) {
  const double c = std::cos(phi);
  return cplx(c * std::tanh(c * (x - x_c)), std::sin(phi));
}

namespace detail {
inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

inline double parse_number(const std::string& s, const std::string& ctx) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InvalidArgument("malformed number '" + s + "' in preset '" + ctx + "'");
  }
}
}  // namespace detail

inline bool is_preset_name(const std::string& spec) {
  const auto head = detail::split(spec, ':').front();
  return head == "one" || head == "black" || head == "dark" || head == "bump" || head == "kinkpair";
}

/// Samples a named preset: one, black, dark:<phi>, bump:<a>:<w>, kinkpair:<d>.
inline SampledFunction preset_samples(const std::string& spec, const Grid& g) {
  auto parts = detail::split(spec, ':');
  const auto& name = parts[0];
  auto arity = [&](std::size_t k) {
    require(parts.size() == k + 1, "preset '" + name + "' expects " + std::to_string(k) + " parameter(s)");
  };
  if (name == "one") {
    arity(0);
    return sample(g, [](double) { return cplx(1.0); });
  }
  if (name == "black") {
    arity(0);
    return sample(g, [](double x) { return cplx(std::tanh(x)); });
  }
  if (name == "dark") {
    arity(1);
    const double phi = detail::parse_number(parts[1], spec);
    require(std::abs(phi) < std::numbers::pi / 2, "dark soliton angle must lie in (-pi/2, pi/2)");
    return sample(g, [phi](double x) { return dark_soliton_value(phi, x); });
  }
  if (name == "bump") {
    arity(2);
    const double a = detail::parse_number(parts[1], spec);
    const double w = detail::parse_number(parts[2], spec);
    require(w > 0.0, "bump width must be positive");
    return sample(g, [a, w](double x) { return cplx(1.0 + a * std::exp(-(x / w) * (x / w))); });
  }
  if (name == "kinkpair") {
    arity(1);
    const double d = detail::parse_number(parts[1], spec);
    return sample(g, [d](double x) { return cplx(std::tanh(x + d) * std::tanh(d - x)); });
  }
  throw InvalidArgument("unknown preset '" + spec + "'");
}

inline GPField make_preset(const std::string& spec, const Grid& g, FieldTolerance tol = {}) {
  return GPField(preset_samples(spec, g), tol);
}

}  // namespace gpscatter
