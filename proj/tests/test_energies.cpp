#include <gtest/gtest.h>

#include <cmath>

#include "gpscatter/energies.hpp"

using namespace gpscatter;

namespace {
const Grid g = make_grid(40.0, 1024, -20.0);

// int_0^2 t^2 sqrt(tau^2 - t^2) dt: the bound-state part of E^{3/2}_tau for
// the black soliton, whose cut density vanishes.
double black_energy_15(double tau) {
  const double a = tau, t = 2.0;
  return t * (2 * t * t - a * a) * std::sqrt(a * a - t * t) / 8.0 + std::pow(a, 4) / 8.0 * std::asin(t / a);
}
}  // namespace

TEST(EigenTerm, SignPattern) {
  for (int l = 0; l <= 2; ++l)
    for (const double y : {0.3, 1.0}) {
      const double expected = ((l % 2) ? -1.0 : 1.0) * std::pow(2.0 * y, 2 * l + 3) / (2 * l + 3);
      EXPECT_NEAR(eigen_term(l, cplx(0.0, y)), expected, 1e-14 * std::abs(expected));
    }
}

TEST(TraceFormula, BlackSolitonIsPureBoundState) {
  const JostSolver s(make_preset("black", g));
  EnergyCalculator c(s);
  const auto h2 = c.hamiltonian(0);
  EXPECT_LT(std::abs(h2.cut), 1e-9);
  EXPECT_NEAR(h2.eigen, 8.0 / 3.0, 1e-9);
  EXPECT_NEAR(h2.value, 2.0 * ginzburg_landau(s.field()), 1e-8);
  EXPECT_NEAR(c.hamiltonian(1).value, -32.0 / 5.0, 1e-8);
}

TEST(TraceFormula, ClosesOnPresets) {
  for (const std::string spec : {"dark:0.5", "bump:0.1:1"}) {
    const JostSolver s(make_preset(spec, g));
    const double h2 = trace_hamiltonian(s, 0);
    EXPECT_NEAR(h2 / (2.0 * ginzburg_landau(s.field())), 1.0, 1e-6) << spec;
  }
  // Dark soliton: E_GL = (4/3) cos^3 phi.
  const JostSolver d(make_preset("dark:0.5", g));
  EXPECT_NEAR(trace_hamiltonian(d, 0), 8.0 / 3.0 * std::pow(std::cos(0.5), 3), 1e-6);
}

TEST(GDecay, TauGApproachesH2) {
  const JostSolver s(make_preset("bump:0.1:1", g));
  EnergyCalculator c(s);
  const double h2 = c.hamiltonian(0).value, h4 = c.hamiltonian(1).value;
  for (const double tau : {16.0, 32.0, 64.0}) {
    // tau G = H2 - H4/tau^2 + O(tau^-4)
    EXPECT_NEAR(tau * c.g(tau), h2 - h4 / (tau * tau), 20.0 * std::abs(h4) / std::pow(tau, 4)) << tau;
  }
}

TEST(Energy, RejectsLowRegularity) {
  const JostSolver s(make_preset("one", g));
  EnergyCalculator c(s);
  EXPECT_THROW(c.energy(0.5, 4.0), InvalidArgument);
  EXPECT_THROW(c.energy(1.5, 1.0), InvalidArgument);
}

TEST(Energy, IntegerShortcut) {
  const JostSolver s(make_preset("bump:0.1:1", g));
  EnergyCalculator c(s);
  const double tau = 3.0;
  const auto e1 = c.energy(1.0, tau), e2 = c.energy(2.0, tau);
  EXPECT_TRUE(e2.integer_shortcut);
  EXPECT_DOUBLE_EQ(e1.value, c.hamiltonian(0).value);
  EXPECT_NEAR(e2.value, tau * tau * c.hamiltonian(0).value + c.hamiltonian(1).value, 1e-14);
  EXPECT_NEAR(e2.value / c.energy_trace(2.0, tau), 1.0, 1e-10);
  // E^1 = ||(|q|^2-1, q')||^2 exactly.
  EXPECT_NEAR(c.equivalence(1.0, tau).ratio, 1.0, 1e-6);
}

TEST(Energy, BlackSolitonClosedForm) {
  const JostSolver s(make_preset("black", g));
  EnergyCalculator c(s);
  for (const double tau : {4.0, 8.0}) {
    EXPECT_NEAR(c.energy_trace(1.5, tau) / black_energy_15(tau), 1.0, 1e-9);
    EXPECT_NEAR(c.energy(1.5, tau).value / black_energy_15(tau), 1.0, 1e-6);
  }
}

TEST(Energy, LargeTauFormMatchesCutIntegral) {
  const JostSolver s(make_preset("bump:0.05:1", g));
  EnergyCalculator c(s);
  const auto e = c.energy(1.5, 8.0);
  EXPECT_FALSE(e.integer_shortcut);
  EXPECT_NEAR(e.value / c.energy_trace(1.5, 8.0), 1.0, 1e-6);
  EXPECT_LT(std::abs(e.coefficient_mismatch.at(0)), 1e-6);
}

TEST(Expansion, FourTermResidualDecaysAtFifthOrder) {
  const JostSolver s(make_preset("bump:0.1:1", g));
  const auto r = expansion_check(s, {8.0, 16.0, 32.0, 64.0});
  EXPECT_NEAR(r.slope, -5.0, 0.5);
  EXPECT_NEAR(r.h2, 2.0 * ginzburg_landau(s.field()), 1e-14);
}

TEST(QuadraticTerm, PathsAgreeAndPoissonFormHolds) {
  const GPField q(sample(g, [](double x) { return 1.0 + 0.05 * cplx(1.0, 0.5) * std::exp(-x * x) * cplx(1.0 + 0.3 * x, 0.2 * x * x); }));
  for (const double tau : {3.0, 8.0}) {
    const auto t = quadratic_term(q, tau);
    EXPECT_NEAR(std::abs(t.value - t.ordered_value) / std::abs(t.value), 0.0, 1e-8);
    EXPECT_NEAR((-tau * tau * t.value).real() / t.poisson_real, 1.0, 1e-8);
  }
  EXPECT_EQ(quadratic_term(make_preset("one", g), 4.0).value, cplx(0.0));
}

TEST(QuadraticTerm, RemainderIsCubicInAmplitude) {
  std::vector<double> amps{0.02, 0.04, 0.08}, rem;
  for (const double a : amps) {
    const GPField q(sample(g, [a](double x) { return 1.0 + a * cplx(1.0, -0.7) * std::exp(-x * x / 2.0); }));
    const auto lt = JostSolver(q).transmission(imag_axis_point(4.0)).log_value;
    rem.push_back(std::abs(lt - quadratic_term(q, 4.0).value));
  }
  EXPECT_NEAR(quad::log_log_slope(amps, rem), 3.0, 0.2);
}
