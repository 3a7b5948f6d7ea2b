#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "gpscatter/miura.hpp"

using namespace gpscatter;

namespace {
const Grid g = make_grid(40.0, 1024, -20.0);

double sech2(double x) { return 1.0 / (std::cosh(x) * std::cosh(x)); }

double l2(const SampledFunction& a, auto&& exact) {
  double s = 0.0;
  for (int j = 0; j < a.size(); ++j) s += std::norm(a[j] - cplx(exact(a.grid.x(j))));
  return std::sqrt(s * a.grid.dx());
}
}  // namespace

TEST(MiuraMap, Constants) {
  EXPECT_LT(l2(miura_map(sample(g, [](double) { return -1.0; })), [](double) { return 0.0; }), 1e-14);
  EXPECT_LT(l2(miura_map(sample(g, [](double) { return 1.0; })), [](double) { return 0.0; }), 1e-14);
}

TEST(MiuraMap, KinkGivesSoliton) {
  const auto u = miura_map(sample(g, [](double x) { return -std::tanh(x); }));
  EXPECT_LT(l2(u, [](double x) { return -2.0 * sech2(x); }), 1e-10);
}

TEST(MiuraMap, RejectsComplexInput) { EXPECT_THROW(miura_map(preset_samples("dark:0.5", g)), InvalidArgument); }

TEST(MiuraMap, LinearisationIdentity) {
  const auto q = sample(g, [](double x) { return -std::tanh(x) + 0.1 * std::exp(-x * x); });
  const auto h = sample(g, [](double x) { return std::exp(-(x - 1) * (x - 1)) * std::sin(2 * x); });
  const double eps = 1e-5;
  const auto up = miura_map(sample(g, [&](double x) { return -std::tanh(x) + 0.1 * std::exp(-x * x) + eps * std::exp(-(x - 1) * (x - 1)) * std::sin(2 * x); }));
  const auto dn = miura_map(sample(g, [&](double x) { return -std::tanh(x) + 0.1 * std::exp(-x * x) - eps * std::exp(-(x - 1) * (x - 1)) * std::sin(2 * x); }));
  const auto hx = spectral_derivative(h, 1);
  double err = 0.0;
  for (int j = 0; j < g.n; ++j) {
    const double fd = (up[j].real() - dn[j].real()) / (2 * eps);
    err = std::max(err, std::abs(fd - (hx[j].real() + 2.0 * q[j].real() * h[j].real())));
  }
  EXPECT_LT(err, 1e-6);
}

TEST(InverseMiura, ZeroGivesMinusOne) {
  const auto inv = inverse_miura(sample(g, [](double) { return 0.0; }));
  EXPECT_LT(l2(inv.v, [](double) { return -1.0; }), 1e-14);
}

TEST(InverseMiura, RoundTripOnCaseAData) {
  auto u0 = [](double x) { return -0.5 * sech2(x / 2.0); };
  const auto inv = inverse_miura(sample(g, u0));
  EXPECT_LE(inv.residual, 1e-7);
  EXPECT_LT(l2(miura_map(inv.v), u0), 1e-6);
}

TEST(InverseMiura, SucceedsOnMiuraImagesOfSmallData) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> amp(-0.2, 0.2), pos(-3.0, 3.0);
  for (int trial = 0; trial < 5; ++trial) {
    const double a = amp(rng), b = amp(rng), c = pos(rng);
    const auto w = sample(g, [=](double x) { return -1.0 + a * std::exp(-(x - c) * (x - c)) + b * std::exp(-x * x / 4.0); });
    const auto u = miura_map(w);
    const auto back = miura_map(inverse_miura(u).v);
    double err = 0.0;
    for (int j = 0; j < g.n; ++j) err = std::max(err, std::abs(back[j] - u[j]));
    EXPECT_LT(err, 1e-6);
  }
}

TEST(InverseMiura, DeepWellViolatesTheSpectralCondition) {
  const auto u = sample(g, [](double x) { return -3.0 * sech2(x); });
  try {
    inverse_miura(u);
    FAIL() << "expected a spectral-condition error";
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("spectral condition violated"), std::string::npos);
  }
}

TEST(LinearizedInverse, ZeroSourceGivesZero) {
  const auto z = sample(g, [](double) { return 0.0; });
  EXPECT_EQ(l2(linearized_inverse(z, z).tf, [](double) { return 0.0; }), 0.0);
}

TEST(LinearizedInverse, ConstantSourceOnTheRight) {
  // w0 = 0, f = 1 on [0, inf) smoothly cut: Tf -> -1/2 away from the edges.
  const auto w0 = sample(g, [](double) { return 0.0; });
  const auto f = sample(g, [](double x) { return 0.5 * (1.0 + std::tanh(2.0 * x)) * 0.5 * (1.0 - std::tanh(2.0 * (x - 15.0))); });
  const auto t = linearized_inverse(w0, f);
  for (const double x : {4.0, 6.0, 8.0}) EXPECT_NEAR(t.tf[static_cast<int>((x - g.x0) / g.dx())].real(), -0.5, 1e-6);
  EXPECT_LT(t.residual_l2, 1e-7);
}

TEST(LinearizedInverse, RightInverseOnRandomData) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> amp(-0.5, 0.5), pos(-3.0, 3.0);
  for (int trial = 0; trial < 4; ++trial) {
    const double a = amp(rng), c = pos(rng), b = amp(rng);
    const auto w0 = sample(g, [=](double x) { return a * std::exp(-(x - c) * (x - c) / 2.0); });
    const auto f = sample(g, [=](double x) { return std::exp(-x * x / 3.0) * std::cos(b * 4.0 * x); });
    EXPECT_LT(linearized_inverse(w0, f).residual_l2, 1e-7);
  }
}

TEST(Correspondence, TrivialAndKink) {
  EXPECT_EQ(mkdv_kdv_correspondence(sample(g, [](double) { return 1.0; }), 0.1).max_mismatch, 0.0);
  EXPECT_LT(mkdv_kdv_correspondence(sample(g, [](double x) { return -std::tanh(x); }), 0.5).max_mismatch, 1e-4);
}

TEST(Correspondence, PerturbedKink) {
  const auto q0 = sample(g, [](double x) { return -std::tanh(x) + 0.05 * sech2(x); });
  const auto rep = mkdv_kdv_correspondence(q0, 0.25, 1e-3, 50);
  EXPECT_EQ(rep.points.size(), 6u);
  EXPECT_LT(rep.max_mismatch, 5e-4);
  // Refinement: halving dt leaves the mismatch essentially unchanged (it is
  // set by the spatial resolution, not the time step).
  EXPECT_NEAR(mkdv_kdv_correspondence(q0, 0.25, 5e-4).max_mismatch, rep.max_mismatch, 0.1 * rep.max_mismatch);
}
