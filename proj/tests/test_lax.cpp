#include <gtest/gtest.h>

#include <cmath>

#include "gpscatter/energies.hpp"
#include "gpscatter/lax.hpp"

using namespace gpscatter;

namespace {
const Grid g = make_grid(40.0, 1024, -20.0);

// G of the black soliton: (tau^2/2) ln((tau+2)/(tau-2)) - 2 tau.
double g_black(double tau) { return 0.5 * tau * tau * std::log((tau + 2.0) / (tau - 2.0)) - 2.0 * tau; }
}  // namespace

TEST(SpectralPoints, SheetRelations) {
  const auto p = surface_point(cplx(0.3, 0.7));
  EXPECT_NEAR(std::abs(p.lambda * p.lambda - p.z * p.z - 1.0), 0.0, 1e-14);
  EXPECT_GT(p.z.imag(), 0.0);
  const auto a = imag_axis_point(5.0, -1);
  EXPECT_NEAR(std::abs(a.lambda * a.lambda - a.z * a.z - 1.0), 0.0, 1e-13);
  EXPECT_NEAR(a.z.imag(), 2.5, 0.0);
  const auto c = cut_point(3.0, 1);
  EXPECT_NEAR(std::abs(c.lambda * c.lambda - c.z * c.z - 1.0), 0.0, 1e-14);
  EXPECT_THROW(surface_point(cplx(1.5, 0.0)), InvalidArgument);
  EXPECT_THROW(imag_axis_point(1.0), InvalidArgument);
}

TEST(Transmission, TrivialForTheConstant) {
  const JostSolver s(make_preset("one", g));
  for (const auto& pt : {imag_axis_point(3.0), imag_axis_point(3.0, -1), surface_point(cplx(0.2, 0.5)), cut_point(1.5)}) {
    const auto t = s.transmission(pt);
    EXPECT_LT(std::abs(t.log_value), 1e-11);
  }
}

TEST(Transmission, BlackSolitonIsReflectionless) {
  const JostSolver s(make_preset("black", g));
  for (const auto& c : cut_samples(s, {-9.0, -3.0, -0.4, 0.4, 3.0, 9.0})) {
    EXPECT_NEAR(std::abs(c.plus), 1.0, 1e-9);
    EXPECT_NEAR(std::abs(c.minus), 1.0, 1e-9);
  }
}

TEST(Transmission, BlackSolitonGMatchesClosedForm) {
  const JostSolver s(make_preset("black", g));
  for (const double tau : {2.5, 4.0, 16.0, 128.0}) EXPECT_NEAR(g_value(s, tau) / g_black(tau), 1.0, 1e-9) << tau;
}

TEST(Transmission, RealPartAgreesOnBothSheets) {
  const JostSolver s(make_preset("dark:0.5", g));
  for (const double tau : {3.0, 10.0, 40.0}) {
    const auto a = s.transmission(imag_axis_point(tau, 1)).log_value;
    const auto b = s.transmission(imag_axis_point(tau, -1)).log_value;
    EXPECT_NEAR(a.real(), b.real(), 1e-12 + 1e-9 * std::abs(a.real()));
  }
}

TEST(Transmission, RoutesAgree) {
  // w-form vs Lax route on a flat bump, and the mirrored w-form vs the Lax
  // route where a dark soliton brings the w-form close to its poles.
  const JostSolver bump(make_preset("bump:0.2:1", g));
  for (const auto& pt : {imag_axis_point(3.0), surface_point(cplx(0.4, 1.1)), surface_point(cplx(-2.0, 0.3))}) {
    const auto w = bump.transmission(pt);
    ASSERT_EQ(w.route, Route::w_form);
    EXPECT_NEAR(std::abs(w.log_value - bump.transmission_via_lax(pt).log_value), 0.0, 1e-9);
  }
  const JostSolver dark(make_preset("dark:0.2", g));
  const auto pt = imag_axis_point(12.0, -1);
  const auto m = dark.transmission(pt);
  EXPECT_EQ(m.route, Route::w_form_mirror);
  EXPECT_NEAR(std::abs(m.log_value - dark.transmission_via_lax(pt).log_value), 0.0, 1e-10);
}

TEST(Transmission, GaugeInvariant) {
  const auto q = make_preset("dark:0.3", g);
  const JostSolver a(q), b(q.rotated(0.9));
  for (const auto& pt : {imag_axis_point(4.0), surface_point(cplx(0.1, 0.6))})
    EXPECT_NEAR(std::abs(a.transmission(pt).value - b.transmission(pt).value), 0.0, 1e-10);
}

TEST(Transmission, CutNeedsTheLaxRoute) {
  const JostSolver s(make_preset("bump:0.1:1", g));
  EXPECT_EQ(s.transmission(cut_point(2.0)).route, Route::u_form);
  EXPECT_THROW(s.lax_classical(cut_point(0.0)), InvalidArgument);
}

TEST(Eigenvalues, BlackSoliton) {
  const auto rep = eigenvalues(JostSolver(make_preset("black", g)));
  ASSERT_EQ(rep.eigenvalues.size(), 1u);
  EXPECT_LT(std::abs(rep.eigenvalues[0].lambda), 1e-8);
  EXPECT_NEAR(rep.eigenvalues[0].z_im, 1.0, 1e-6);
}

TEST(Eigenvalues, DarkSolitonSitsAtMinusSinPhi) {
  for (const double phi : {0.3, 0.8}) {
    const auto rep = eigenvalues(JostSolver(GPField(sample(g, [phi](double x) { return dark_soliton_value(phi, x); }))));
    ASSERT_EQ(rep.eigenvalues.size(), 1u);
    EXPECT_NEAR(rep.eigenvalues[0].lambda, -std::sin(phi), 1e-8);
    EXPECT_NEAR(rep.eigenvalues[0].z_im, std::cos(phi), 1e-8);
    EXPECT_LT(rep.max_imag_residue, 1e-8);
  }
}

TEST(Eigenvalues, NoneForASmallBump) {
  EXPECT_TRUE(eigenvalues(JostSolver(make_preset("bump:0.1:1", g))).eigenvalues.empty());
}

TEST(Neumann, ConvergesToTheJostSolution) {
  const JostSolver s(make_preset("bump:0.1:1", g));
  for (const auto& pt : {imag_axis_point(4.0), imag_axis_point(10.0), surface_point(cplx(0.3, 2.0))}) {
    const auto n = s.neumann_series(pt, 30);
    EXPECT_FALSE(n.smallness_warning);
    EXPECT_LT(n.tail_estimate, 1e-14);
    EXPECT_NEAR(std::abs(n.partial_sums.back() - s.jost(pt).w_inf), 0.0, 1e-8);
  }
}

TEST(Neumann, DivergenceIsReported) {
  // A deep, wide perturbation at a point close to the spectrum.
  const JostSolver s(GPField(sample(g, [](double x) { return 1.0 + 3.0 * std::exp(-x * x / 9.0); })));
  EXPECT_THROW(s.neumann_series(surface_point(cplx(0.0, 0.05)), 40), NumericalError);
}

TEST(PhiCorrection, MatchesRenormalisationAtLargeZ) {
  // ln T^{-1} ~ M/tau at large tau, so ln T_c^{-1} ~ M/tau - iM/(2z)... on the
  // imaginary axis -iM/(2z) = -M/tau cancels the leading term.
  const JostSolver s(make_preset("bump:0.1:1", g));
  const double tau = 200.0;
  EXPECT_LT(std::abs(s.transmission(imag_axis_point(tau)).log_value), 1e-5);
  EXPECT_NEAR(s.classical_log(imag_axis_point(tau)).real(), s.mass() / tau, 1e-5);
}
