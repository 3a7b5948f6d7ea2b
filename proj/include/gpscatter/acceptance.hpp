#pragma once

// The acceptance suite: twelve end-to-end checks, each returning the measured
// quantities and a verdict. Shared by the acceptance binary and `verify`.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "gpscatter/energies.hpp"
#include "gpscatter/evolution.hpp"
#include "gpscatter/field.hpp"
#include "gpscatter/lax.hpp"
#include "gpscatter/metric.hpp"
#include "gpscatter/miura.hpp"

namespace gpscatter::acceptance {

struct Measurement {
  std::string name;
  double value = 0.0;
  double limit = 0.0;  // NaN when the value is informational
  bool pass = true;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::vector<Measurement> values;
  std::string note;
  double seconds = 0.0;  // wall clock, reported separately from the data
};

namespace detail {

inline constexpr double info = std::numeric_limits<double>::quiet_NaN();

class Recorder {
 public:
  Recorder(int id, std::string title) { r_.id = id, r_.title = std::move(title); }

  // value <= limit
  void at_most(const std::string& name, double value, double limit) {
    r_.values.push_back({name, value, limit, std::isfinite(value) && value <= limit});
  }
  // |value - target| <= tol, limit reported as the target
  void near(const std::string& name, double value, double target, double tol) {
    r_.values.push_back({name, value, target, std::isfinite(value) && std::abs(value - target) <= tol});
  }
  void check(const std::string& name, double value, bool ok) { r_.values.push_back({name, value, info, ok}); }
  void report(const std::string& name, double value) { r_.values.push_back({name, value, info, true}); }
  void note(const std::string& s) { r_.note += (r_.note.empty() ? "" : "; ") + s; }

  CriterionResult finish() {
    r_.pass = !r_.values.empty();
    for (const auto& m : r_.values) r_.pass = r_.pass && m.pass;
    return std::move(r_);
  }

 private:
  CriterionResult r_;
};

inline Grid reference_grid() { return make_grid(40.0, 1024, -20.0); }

inline double l2_distance(const SampledFunction& a, const std::function<cplx(double)>& f) {
  double s = 0.0;
  for (int j = 0; j < a.size(); ++j) s += std::norm(a.values[j] - f(a.grid.x(j)));
  return std::sqrt(s * a.grid.dx());
}

inline double l2_distance(const SampledFunction& a, const SampledFunction& b) {
  double s = 0.0;
  for (int j = 0; j < a.size(); ++j) s += std::norm(a.values[j] - b.values[j]);
  return std::sqrt(s * a.grid.dx());
}

// Position of the density minimum, from a parabola through the three lowest
// samples of the band-limited interpolant.
inline double dip_position(const SampledFunction& f) {
  const auto r = refine(f, 32);
  const double window = f.grid.length / 4.0;
  int best = -1;
  for (int j = 1; j + 1 < r.size(); ++j)
    if (std::abs(r.grid.x(j)) < window && (best < 0 || std::abs(r.values[j]) < std::abs(r.values[best]))) best = j;
  const double ym = std::norm(r.values[best - 1]), y0 = std::norm(r.values[best]), yp = std::norm(r.values[best + 1]);
  return r.grid.x(best) + r.grid.dx() * 0.5 * (ym - yp) / (ym - 2.0 * y0 + yp);
}

inline SampledFunction perturbed_dark(const Grid& g) {
  return sample(g, [](double x) { return dark_soliton_value(0.5, x) * (1.0 + 0.05 * std::exp(-(x - 1) * (x - 1) / 4.0)); });
}

// 1 + a few complex Gaussian bumps near the origin.
inline GPField random_field(const Grid& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> amp(-0.3, 0.3), pos(-4.0, 4.0), width(0.5, 1.5);
  struct Bump {
    cplx c;
    double x, w;
  };
  std::vector<Bump> bumps(3);
  for (auto& b : bumps) {
    b.c = cplx(amp(rng), amp(rng));
    b.x = pos(rng);
    b.w = width(rng);
  }
  return GPField(sample(g, [&](double x) {
    cplx v = 1.0;
    for (const auto& b : bumps) v += b.c * std::exp(-(x - b.x) * (x - b.x) / (b.w * b.w));
    return v;
  }));
}

// Largest sum of squared increments over all subsequences, by enumeration.
inline double two_variation_exhaustive(const std::vector<cplx>& v) {
  std::vector<cplx> seq(v);
  seq.push_back(0.0);
  const std::size_t n = seq.size();
  double best = 0.0;
  for (unsigned long mask = 0; mask < (1ul << n); ++mask) {
    double acc = 0.0;
    int prev = -1;
    for (std::size_t j = 0; j < n; ++j) {
      if (!(mask >> j & 1ul)) continue;
      if (prev >= 0) acc += std::norm(seq[j] - seq[prev]);
      prev = static_cast<int>(j);
    }
    best = std::max(best, acc);
  }
  return std::sqrt(best);
}

}  // namespace detail

inline CriterionResult stationary_black_soliton() {
  detail::Recorder rec(1, "stationary black soliton");
  const auto q = make_preset("black", detail::reference_grid());
  const auto tr = evolve_gp(q, 1e-3, 1.0);
  rec.at_most("l2_error_t1", detail::l2_distance(tr.states.back(), [](double x) { return cplx(std::tanh(x)); }), 1e-6);
  return rec.finish();
}

inline CriterionResult dark_soliton_speed() {
  detail::Recorder rec(2, "dark soliton kinematics");
  for (const double phi : {std::numbers::pi / 6, std::numbers::pi / 3}) {
    // The faster, shallower soliton needs a longer box to keep its wings flat.
    const Grid g = phi > 1.0 ? make_grid(80.0, 2048, -40.0) : detail::reference_grid();
    const GPField q(sample(g, [phi](double x) { return dark_soliton_value(phi, x); }));
    const auto tr = evolve_gp(q, 1e-3, 1.0);
    const double v = detail::dip_position(tr.states.back()) - detail::dip_position(tr.states.front());
    const std::string tag = phi > 1.0 ? "pi/3" : "pi/6";
    rec.report("speed_" + tag, v);
    rec.at_most("rel_error_" + tag, std::abs(v / (2.0 * std::sin(phi)) - 1.0), 1e-3);
  }
  return rec.finish();
}

inline CriterionResult scattering_conservation() {
  detail::Recorder rec(3, "scattering conservation under GP and mKdV");
  const std::vector<double> taus{4.0, 6.0, 10.0};
  auto drift = [&](const std::string& flow, const Trajectory& tr, double decay) {
    FieldTolerance tol;
    tol.decay = decay;  // evolved states carry a little radiation into the margins
    const JostSolver a(GPField(tr.states.front(), tol)), b(GPField(tr.states.back(), tol));
    for (const double tau : taus)
      for (const int sign : {1, -1}) {
        const auto pt = imag_axis_point(tau, sign);
        const cplx ta = a.transmission(pt).value, tb = b.transmission(pt).value;
        rec.at_most(flow + "_tau" + std::to_string(static_cast<int>(tau)) + (sign > 0 ? "_plus" : "_minus"),
                    std::abs(tb - ta) / std::abs(ta), 5e-5);
      }
  };
  const Grid g = detail::reference_grid();
  drift("gp", evolve_gp(GPField(detail::perturbed_dark(g)), 1e-3, 1.0), 1e-6);
  // mKdV disperses radiation leftwards fast; the box is extended on that side.
  const Grid gm = make_grid(160.0, 4096, -130.0);
  drift("mkdv", evolve_mkdv(GPField(detail::perturbed_dark(gm)), 1e-3, 1.0), 1e-5);
  return rec.finish();
}

inline CriterionResult trace_formula_closure() {
  detail::Recorder rec(4, "trace formula closure H2 = 2 E_GL");
  for (const std::string spec : {"black", "dark:0.5", "bump:0.1:1"}) {
    const auto q = make_preset(spec, detail::reference_grid());
    const JostSolver s(q);
    const double h2 = trace_hamiltonian(s, 0);
    const double gl = 2.0 * ginzburg_landau(q);
    rec.at_most("rel_error_" + spec, std::abs(h2 - gl) / std::abs(gl), 1e-3);
  }
  return rec.finish();
}

inline CriterionResult reflectionless_spectrum() {
  detail::Recorder rec(5, "reflectionless black soliton");
  const JostSolver s(make_preset("black", detail::reference_grid()));
  std::vector<double> xis;
  for (int i = 1; i <= 40; ++i) {
    xis.push_back(10.0 * i / 40.0);
    xis.push_back(-10.0 * i / 40.0);
  }
  double worst = 0.0;
  for (const auto& c : cut_samples(s, xis))
    worst = std::max({worst, std::abs(std::abs(c.plus) - 1.0), std::abs(std::abs(c.minus) - 1.0)});
  rec.at_most("max_abs_modulus_minus_one_on_cut", worst, 1e-6);
  const auto eig = eigenvalues(s);
  rec.near("eigenvalue_count", static_cast<double>(eig.eigenvalues.size()), 1.0, 0.0);
  if (eig.eigenvalues.size() == 1) {
    rec.at_most("abs_lambda", std::abs(eig.eigenvalues[0].lambda), 1e-8);
    rec.at_most("abs_im_z_minus_one", std::abs(eig.eigenvalues[0].z_im - 1.0), 1e-6);
  }
  return rec.finish();
}

inline CriterionResult four_term_expansion() {
  detail::Recorder rec(6, "four-term large-tau expansion");
  const JostSolver s(make_preset("bump:0.1:1", detail::reference_grid()));
  std::vector<double> taus;
  for (int i = 0; i <= 6; ++i) taus.push_back(8.0 * std::pow(2.0, i / 2.0));
  const auto r = expansion_check(s, taus);
  rec.near("residual_slope", r.slope, -5.0, 0.5);
  rec.report("residual_tau8", r.residual.front());
  rec.report("residual_tau64", r.residual.back());
  return rec.finish();
}

// Expected to fail as things stand. At s = 1 the energy and its cut-integral
// form agree exactly, so the ratio never departs from 1. At s = 1.5 the
// departure falls off like tau^-2, not tau^-1.5. The check is kept as stated.
inline CriterionResult energy_equivalence() {
  detail::Recorder rec(7, "energy equivalence rate");
  const JostSolver s(make_preset("bump:0.05:1", detail::reference_grid()));
  EnergyCalculator calc(s);
  const std::vector<double> taus{4.0, 8.0, 16.0, 32.0};
  for (const double sv : {1.0, 1.5}) {
    const std::string tag = sv == 1.0 ? "s1" : "s1.5";
    std::vector<double> dev;
    for (const double tau : taus) {
      const auto e = calc.equivalence(sv, tau);
      dev.push_back(std::abs(e.ratio - 1.0));
      rec.report(tag + "_ratio_minus_one_tau" + std::to_string(static_cast<int>(tau)), e.ratio - 1.0);
      const double direct = calc.energy_trace(sv, tau);
      rec.at_most(tag + "_energy_vs_cut_integral_tau" + std::to_string(static_cast<int>(tau)),
                  std::abs(e.energy - direct) / std::abs(direct), 1e-6);
    }
    const double target = -(0.5 + std::min(sv, 1.0));
    const bool resolvable = *std::min_element(dev.begin(), dev.end()) > 1e-12;
    const double slope = resolvable ? quad::log_log_slope(taus, dev) : detail::info;
    rec.near(tag + "_decay_rate", slope, target, 0.3);
    if (*std::max_element(dev.begin(), dev.end()) < 1e-6)
      rec.note(tag + ": ratio is 1 up to trace-formula error at every tau; there is no decay to fit");
  }
  return rec.finish();
}

inline CriterionResult family_conservation() {
  detail::Recorder rec(8, "energy family conservation under GP");
  const auto q = make_preset("dark:0.5", detail::reference_grid());
  const auto tr = evolve_gp(q, 1e-3, 1.0);
  FieldTolerance tol;
  tol.decay = 1e-6;
  struct Values {
    double h2, h4, e15;
  };
  auto eval = [&](const SampledFunction& f) {
    const JostSolver s(GPField(f, tol));
    EnergyCalculator c(s);
    return Values{c.hamiltonian(0).value, c.hamiltonian(1).value, c.energy(1.5, 4.0).value};
  };
  const Values a = eval(tr.states.front()), b = eval(tr.states.back());
  auto rel = [](double x, double y) { return std::abs(y - x) / std::max(std::abs(x), 1.0); };
  rec.at_most("H2_drift", rel(a.h2, b.h2), 5e-5);
  rec.at_most("H4_drift", rel(a.h4, b.h4), 5e-5);
  rec.at_most("E1.5_tau4_drift", rel(a.e15, b.e15), 5e-5);
  return rec.finish();
}

inline CriterionResult metric_axioms() {
  detail::Recorder rec(9, "metric axioms and the d0 bound");
  const Grid g = detail::reference_grid();
  std::mt19937_64 rng(20240917);
  std::vector<GPField> fields;
  for (int i = 0; i < 20; ++i) fields.push_back(detail::random_field(g, rng));
  const double s = 1.0;

  std::uniform_int_distribution<int> pick(0, 19);
  std::vector<std::array<int, 3>> triples(50);
  for (auto& t : triples) t = {pick(rng), pick(rng), pick(rng)};
  double violation = 0.0;
  for (const auto& [i, j, k] : triples) {
    const double ij = metric_distance(fields[i], fields[j], s).distance;
    const double jk = metric_distance(fields[j], fields[k], s).distance;
    const double ik = metric_distance(fields[i], fields[k], s).distance;
    violation = std::max(violation, ik - ij - jk);
  }
  rec.at_most("triangle_violation", std::max(violation, 0.0), 1e-9);

  double gauge = 0.0;
  for (int i = 0; i < 5; ++i)
    gauge = std::max(gauge, metric_distance(fields[i], fields[i].rotated(0.3 + 1.1 * i), s).distance);
  rec.at_most("gauge_distance", gauge, 1e-9);

  const GPField one = make_preset("one", g);
  double c = 0.0;
  for (const auto& f : fields) c = std::max(c, metric_distance(one, f, 0.0).distance / energy_norm(f, 0.0, 1.0));
  rec.check("d0_over_E0_max", c, std::isfinite(c));

  double phase = 0.0;
  for (int i = 0; i < 6; ++i) {
    const double y = -3.0 + 1.2 * i;
    const auto pd = weighted_phase_distance(fields[i], fields[i + 1], y, s);
    phase = std::max({phase, std::abs(pd.distance - pd.closed_form),
                      std::abs(pd.distance - phase_grid_distance(fields[i], fields[i + 1], y, s, 720))});
  }
  rec.at_most("phase_infimum_mismatch", phase, 1e-8);
  return rec.finish();
}

inline CriterionResult miura_correspondence() {
  detail::Recorder rec(10, "Miura correspondence");
  const Grid g = detail::reference_grid();
  const auto q0 = sample(g, [](double x) { return cplx(-std::tanh(x) + 0.05 / (std::cosh(x) * std::cosh(x))); });
  rec.at_most("mismatch_t0.25", mkdv_kdv_correspondence(q0, 0.25).max_mismatch, 5e-4);

  const auto u = sample(g, [](double x) { return cplx(-0.5 / (std::cosh(x / 2) * std::cosh(x / 2))); });
  const auto inv = inverse_miura(u);
  rec.at_most("round_trip_sech2", detail::l2_distance(miura_map(inv.v), [&](double x) {
                                     return cplx(-0.5 / (std::cosh(x / 2) * std::cosh(x / 2)));
                                   }),
              1e-6);
  // u = M(w - 1) - 1 for a small smooth w: no eigenvalue <= -1 by construction.
  const auto w = sample(g, [](double x) { return cplx(-1.0 + 0.2 * std::exp(-x * x) * std::cos(x)); });
  const auto uw = miura_map(w);
  const auto back = miura_map(inverse_miura(uw).v);
  rec.at_most("round_trip_miura_image", detail::l2_distance(back, uw), 1e-6);
  return rec.finish();
}

inline CriterionResult quadratic_identity() {
  detail::Recorder rec(11, "quadratic term remainder");
  const Grid g = detail::reference_grid();
  const double tau = 4.0;
  std::vector<double> amps{0.0125, 0.025, 0.05, 0.1}, rem;
  double paths = 0.0, poisson = 0.0;
  for (const double a : amps) {
    const GPField q(sample(g, [a](double x) {
      return 1.0 + a * cplx(1.0, 0.5) * std::exp(-x * x) * cplx(1.0 + 0.3 * x, 0.2 * x * x);
    }));
    const auto t = JostSolver(q).transmission(imag_axis_point(tau));
    const auto Q = quadratic_term(q, tau);
    rem.push_back(std::abs(t.log_value - Q.value));
    paths = std::max(paths, std::abs(Q.value - Q.ordered_value) / std::abs(Q.value));
    poisson = std::max(poisson, std::abs((-tau * tau * Q.value).real() - Q.poisson_real) / Q.poisson_real);
  }
  rec.near("amplitude_exponent", quad::log_log_slope(amps, rem), 3.0, 0.2);
  rec.at_most("fourier_vs_ordered", paths, 1e-8);
  rec.at_most("poisson_form", poisson, 1e-8);
  return rec.finish();
}

inline CriterionResult oracle_equivalence() {
  detail::Recorder rec(12, "oracle equivalence");
  const JostSolver s(make_preset("bump:0.1:1", detail::reference_grid()));
  double worst = 0.0;
  const std::vector<std::pair<std::string, SpectralPoint>> points{{"tau4", imag_axis_point(4.0)},
                                                                   {"tau8", imag_axis_point(8.0)},
                                                                   {"tau16", imag_axis_point(16.0)},
                                                                   {"lambda0.3+2i", surface_point({0.3, 2.0})}};
  for (const auto& [tag, pt] : points) {
    const auto n = s.neumann_series(pt, 30);
    rec.check("surrogate_smallness_" + tag, n.surrogate, !n.smallness_warning);
    worst = std::max(worst, std::abs(n.partial_sums.back() - s.jost(pt).w_inf));
  }
  rec.at_most("neumann_vs_jost", worst, 1e-8);

  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  int mismatches = 0;
  for (int len = 0; len <= 12; ++len)
    for (int trial = 0; trial < 8; ++trial) {
      std::vector<cplx> v(len);
      for (auto& x : v) x = cplx(nd(rng), nd(rng));
      if (two_variation(v) != detail::two_variation_exhaustive(v)) ++mismatches;
    }
  rec.near("two_variation_mismatches", mismatches, 0.0, 0.0);
  return rec.finish();
}

struct Criterion {
  int id;
  bool fast;  // part of the quick suite
  CriterionResult (*run)();
};

inline const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {1, true, stationary_black_soliton}, {2, true, dark_soliton_speed},       {3, true, scattering_conservation},
      {4, true, trace_formula_closure},    {5, true, reflectionless_spectrum},  {6, true, four_term_expansion},
      {7, false, energy_equivalence},      {8, false, family_conservation},     {9, true, metric_axioms},
      {10, true, miura_correspondence},    {11, true, quadratic_identity},      {12, true, oracle_equivalence},
  };
  return all;
}

/// Runs one criterion; exceptions become a failed result carrying the message.
inline CriterionResult run(const Criterion& c) {
  const auto t0 = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    r = c.run();
  } catch (const std::exception& e) {
    r.id = c.id;
    r.pass = false;
    r.note = std::string("error: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace gpscatter::acceptance
