#include <gtest/gtest.h>

#include <cmath>

#include "gpscatter/evolution.hpp"
#include "gpscatter/lax.hpp"

using namespace gpscatter;

namespace {
const Grid g = make_grid(40.0, 1024, -20.0);

double l2(const SampledFunction& a, auto&& exact) {
  double s = 0.0;
  for (int j = 0; j < a.size(); ++j) s += std::norm(a[j] - cplx(exact(a.grid.x(j))));
  return std::sqrt(s * a.grid.dx());
}

double l2(const SampledFunction& a, const SampledFunction& b) {
  double s = 0.0;
  for (int j = 0; j < a.size(); ++j) s += std::norm(a[j] - b[j]);
  return std::sqrt(s * a.grid.dx());
}

double sech2(double x) { return 1.0 / (std::cosh(x) * std::cosh(x)); }

GPField perturbed_dark() {
  return GPField(sample(g, [](double x) { return dark_soliton_value(0.5, x) * (1.0 + 0.05 * std::exp(-(x - 1) * (x - 1) / 4.0)); }));
}
}  // namespace

TEST(GP, ConstantIsStationary) {
  const auto q = GPField(sample(g, [](double) { return std::polar(1.0, 0.7); }));
  const auto tr = evolve_gp(q, 1e-3, 0.5);
  EXPECT_LT(l2(tr.states.back(), q.samples()), 1e-12);
}

TEST(GP, BlackSolitonIsStationary) {
  const auto tr = evolve_gp(make_preset("black", g), 1e-3, 1.0);
  EXPECT_LT(l2(tr.states.back(), [](double x) { return std::tanh(x); }), 1e-6);
}

TEST(GP, DarkSolitonTravelsAtTwoSinPhi) {
  const double phi = std::numbers::pi / 6;
  const GPField q(sample(g, [phi](double x) { return dark_soliton_value(phi, x); }));
  const auto tr = evolve_gp(q, 1e-3, 1.0);
  const double shift = 2.0 * std::sin(phi);
  EXPECT_LT(l2(tr.states.back(), [&](double x) { return dark_soliton_value(phi, x, shift); }), 1e-5);
}

TEST(GP, TimeReversible) { EXPECT_LT(gp_reversibility_error(make_preset("dark:0.5", g), 1e-3, 200), 1e-10); }

TEST(GP, DoubledKinkStaysSymmetric) {
  EXPECT_LT(gp_reflection_symmetry_error(make_preset("dark:0.5", g), 1e-3, 1.0), 1e-9);
}

TEST(GP, MassDriftIsTiny) {
  const auto tr = evolve_gp(perturbed_dark(), 1e-3, 1.0);
  FieldTolerance tol;
  tol.decay = 1e-6;
  const auto table = conservation_monitor(tr, {{"mass", [](const GPField& f) { return mass_momentum(f).mass; }}}, tol);
  EXPECT_LT(table.max_for("mass"), 1e-8);
}

TEST(GP, SecondOrderInTime) {
  // Step sizes chosen so the stability substepping stays at one substep.
  const auto q = perturbed_dark();
  const auto a = evolve_gp(q, 4e-4, 0.2).states.back();
  const auto b = evolve_gp(q, 2e-4, 0.2).states.back();
  const auto c = evolve_gp(q, 1e-4, 0.2).states.back();
  const double order = std::log2(l2(a, b) / l2(b, c));
  EXPECT_NEAR(order, 2.0, 0.2);
}

TEST(GP, RejectsIncommensurateTimes) {
  EXPECT_THROW(evolve_gp(make_preset("one", g), 3e-3, 0.01), InvalidArgument);
  EXPECT_THROW(evolve_gp(make_preset("one", g), -1e-3, 1.0), InvalidArgument);
}

TEST(MKdV, ConstantIsFixed) {
  const GPField q(sample(g, [](double) { return std::polar(1.0, -0.4); }));
  EXPECT_LT(l2(evolve_mkdv(q, 1e-3, 0.2).states.back(), q.samples()), 1e-13);
}

TEST(MKdV, KinkTravelsLeftAtSpeedTwo) {
  const auto tr = evolve_mkdv(make_preset("black", g), 1e-3, 0.5);
  EXPECT_LT(l2(tr.states.back(), [](double x) { return std::tanh(x + 1.0); }), 1e-4);
}

TEST(MKdV, StabilityLimitIsReported) {
  EXPECT_THROW(evolve_mkdv(make_preset("black", g), 0.05, 0.1), NumericalError);
}

TEST(KdV6, ZeroIsFixed) {
  const auto u0 = sample(g, [](double) { return 0.0; });
  EXPECT_EQ(l2(evolve_kdv6(u0, 1e-3, 0.1).states.back(), u0), 0.0);
}

TEST(KdV6, SolitonMovesAtNetSpeedMinusTwo) {
  const auto u0 = sample(g, [](double x) { return -2.0 * sech2(x); });
  const auto tr = evolve_kdv6(u0, 1e-3, 0.5);
  EXPECT_LT(l2(tr.states.back(), [](double x) { return -2.0 * sech2(x + 1.0); }), 1e-4);
}

TEST(KdV6, GalileanShiftOfStandardKdV) {
  // u(x, t) = v(x + 6t, t) with v a standard KdV solution.
  const double t = 0.25;
  const auto u0 = sample(g, [](double x) { return -1.2 * sech2(0.8 * x) + 0.3 * std::exp(-x * x); });
  const auto u = evolve_kdv6(u0, 1e-3, t).states.back();
  const auto v = evolve_kdv(u0, 1e-3, t).states.back();
  const auto shifted = apply_multiplier(v, [t](double k, bool nyq) { return nyq ? cplx(1.0) : std::polar(1.0, 6.0 * t * k); });
  EXPECT_LT(l2(u, shifted), 1e-8);
}

TEST(KdV6, RejectsKinks) { EXPECT_THROW(evolve_kdv6(preset_samples("black", g), 1e-3, 0.1), InvalidArgument); }

TEST(Monitor, ConstantTrajectoryHasNoDrift) {
  const auto tr = evolve_gp(make_preset("one", g), 1e-3, 0.1, {.snapshot_every = 10});
  EXPECT_EQ(tr.states.size(), 11u);
  const auto table = conservation_monitor(tr, {{"E_GL", [](const GPField& f) { return ginzburg_landau(f); }}});
  EXPECT_EQ(table.max_for("E_GL"), 0.0);
  EXPECT_EQ(table.rows.size(), 11u);
  EXPECT_THROW(table.max_for("nope"), InvalidArgument);
}

TEST(Monitor, PerturbedDarkSolitonInvariants) {
  const auto tr = evolve_gp(perturbed_dark(), 1e-3, 1.0, {.snapshot_every = 250});
  FieldTolerance tol;
  tol.decay = 1e-6;
  const auto table = conservation_monitor(tr,
                                          {{"momentum", [](const GPField& f) { return mass_momentum(f).momentum; }},
                                           {"E_GL", [](const GPField& f) { return ginzburg_landau(f); }},
                                           {"H3", [](const GPField& f) { return hamiltonian_h3(f); }}},
                                          tol);
  for (const auto& [name, d] : table.max_drift) EXPECT_LT(d, 5e-5) << name;
}

TEST(Monitor, TransmissionIsConservedUnderGP) {
  const auto tr = evolve_gp(perturbed_dark(), 1e-3, 1.0, {.snapshot_every = 500});
  FieldTolerance tol;
  tol.decay = 1e-6;
  const auto pt = imag_axis_point(6.0);
  const auto table = conservation_monitor(
      tr,
      {{"re", [&](const GPField& f) { return JostSolver(f).transmission(pt).value.real(); }},
       {"im", [&](const GPField& f) { return JostSolver(f).transmission(pt).value.imag(); }}},
      tol);
  EXPECT_LT(table.max_for("re"), 5e-5);
  EXPECT_LT(table.max_for("im"), 5e-5);
}
