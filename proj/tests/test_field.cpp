#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "gpscatter/field.hpp"

using namespace gpscatter;

namespace {
const Grid g = make_grid(40.0, 1024, -20.0);
}

TEST(Field, BoundaryClassification) {
  EXPECT_EQ(make_preset("one", g).boundary_kind(), BoundaryKind::flat);
  EXPECT_EQ(make_preset("bump:0.1:1", g).boundary_kind(), BoundaryKind::flat);
  EXPECT_EQ(make_preset("kinkpair:4", g).boundary_kind(), BoundaryKind::flat);
  EXPECT_EQ(make_preset("black", g).boundary_kind(), BoundaryKind::kink);
  EXPECT_EQ(make_preset("dark:0.5", g).boundary_kind(), BoundaryKind::kink);
}

TEST(Field, RejectsFieldsThatAreNotFlatAtTheEdges) {
  // |q| -> 1 too slowly for this box.
  EXPECT_THROW(GPField(sample(g, [](double x) { return 1.0 + 0.5 / (1.0 + x * x); })), InvalidArgument);
  EXPECT_THROW(GPField(sample(g, [](double x) { return std::tanh(0.1 * x); })), InvalidArgument);
  EXPECT_THROW(GPField(sample(g, [](double x) { return x > 0 ? std::nan("") : 1.0; })), InvalidArgument);
}

TEST(Field, PresetParsing) {
  EXPECT_THROW(make_preset("dark", g), InvalidArgument);
  EXPECT_THROW(make_preset("dark:abc", g), InvalidArgument);
  EXPECT_THROW(make_preset("dark:2", g), InvalidArgument);
  EXPECT_THROW(make_preset("bump:0.1:0", g), InvalidArgument);
  EXPECT_THROW(make_preset("nosuch", g), InvalidArgument);
  EXPECT_TRUE(is_preset_name("bump:1:2"));
  EXPECT_FALSE(is_preset_name("field.txt"));
}

TEST(Field, ConstantHasZeroFunctionals) {
  const auto q = make_preset("one", g);
  EXPECT_EQ(ginzburg_landau(q), 0.0);
  EXPECT_EQ(energy_norm(q, 1.5, 4.0), 0.0);
  const auto mp = mass_momentum(q);
  EXPECT_EQ(mp.mass, 0.0);
  EXPECT_EQ(mp.momentum, 0.0);
}

TEST(Field, BlackSolitonClosedForms) {
  // |q|^2 - 1 = -sech^2, q' = sech^2: M = -2, E_GL = int sech^4 = 4/3.
  const auto q = make_preset("black", g);
  EXPECT_NEAR(mass_momentum(q).mass, -2.0, 1e-12);
  EXPECT_NEAR(mass_momentum(q).momentum, 0.0, 1e-14);
  EXPECT_NEAR(ginzburg_landau(q), 4.0 / 3.0, 1e-12);
  // E^1_tau is tau-independent: ||a||^2 + ||b||^2 = 2 E_GL.
  for (const double tau : {1.0, 4.0, 16.0}) EXPECT_NEAR(std::pow(energy_norm(q, 1.0, tau), 2), 8.0 / 3.0, 1e-11);
}

TEST(Field, DarkSolitonClosedForms) {
  // With c = cos(phi), s = sin(phi): M = -2c, P = 2sc, E_GL = (4/3)c^3.
  const double phi = 0.5, c = std::cos(phi), s = std::sin(phi);
  const auto q = make_preset("dark:0.5", g);
  EXPECT_NEAR(mass_momentum(q).mass, -2.0 * c, 1e-12);
  EXPECT_NEAR(mass_momentum(q).momentum, 2.0 * s * c, 1e-12);
  EXPECT_NEAR(ginzburg_landau(q), 4.0 / 3.0 * c * c * c, 1e-12);
}

TEST(Field, GaugeInvariance) {
  const auto q = GPField(sample(g, [](double x) { return dark_soliton_value(0.4, x) * (1.0 + 0.1 * cplx(1, 2) * std::exp(-x * x)); }));
  const auto r = q.rotated(1.234);
  EXPECT_NEAR(ginzburg_landau(q), ginzburg_landau(r), 1e-10);
  EXPECT_NEAR(hamiltonian_h3(q), hamiltonian_h3(r), 1e-10);
  EXPECT_NEAR(mass_momentum(q).mass, mass_momentum(r).mass, 1e-10);
  EXPECT_NEAR(mass_momentum(q).momentum, mass_momentum(r).momentum, 1e-10);
  EXPECT_NEAR(energy_norm(q, 1.5, 4.0), energy_norm(r, 1.5, 4.0), 1e-10);
  const auto pq = derived_pair(q), pr = derived_pair(r);
  for (int j = 0; j < g.n; ++j) EXPECT_NEAR(std::abs(pq.a[j] - pr.a[j]), 0.0, 1e-10);
}

TEST(Field, H3VanishesForRealFields) {
  EXPECT_NEAR(hamiltonian_h3(make_preset("bump:0.3:1.5", g)), 0.0, 1e-13);
  EXPECT_NEAR(hamiltonian_h3(make_preset("kinkpair:4", g)), 0.0, 1e-13);
}

TEST(Field, SurrogateDecaysLikeTheLemmaRate) {
  // tau^{1/2+s} * surrogate / E^s_tau = 1 by construction of the stand-in.
  const auto q = make_preset("bump:0.1:1", g);
  for (const double tau : {2.0, 8.0, 32.0})
    EXPECT_NEAR(std::pow(tau, 2.0) * surrogate_smallness(q, 1.5, tau) / energy_norm(q, 1.5, tau), 1.0, 1e-14);
}

TEST(TwoVariation, SmallCases) {
  const std::vector<cplx> empty;
  EXPECT_EQ(two_variation(empty), 0.0);
  const std::vector<cplx> one{cplx(3.0, 4.0)};
  EXPECT_DOUBLE_EQ(two_variation(one), 5.0);
  EXPECT_DOUBLE_EQ(two_variation(one, false), 0.0);
  // 1 -> -1 -> 0 beats 1 -> 0.
  const std::vector<cplx> flip{1.0, -1.0};
  EXPECT_DOUBLE_EQ(two_variation(flip), std::sqrt(5.0));
  // Monotone steps: the single jump dominates the sum of small squares.
  const std::vector<cplx> ramp{0.0, 0.25, 0.5, 0.75, 1.0};
  EXPECT_DOUBLE_EQ(two_variation(ramp, false), 1.0);
}

TEST(TwoVariation, MatchesExhaustiveSearch) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> nd;
  for (int len = 1; len <= 12; ++len) {
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<cplx> v(len);
      for (auto& x : v) x = cplx(nd(rng), nd(rng));
      std::vector<cplx> seq(v);
      seq.push_back(0.0);
      double best = 0.0;
      for (unsigned long mask = 0; mask < (1ul << seq.size()); ++mask) {
        double acc = 0.0;
        int prev = -1;
        for (std::size_t j = 0; j < seq.size(); ++j) {
          if (!(mask >> j & 1ul)) continue;
          if (prev >= 0) acc += std::norm(seq[j] - seq[prev]);
          prev = static_cast<int>(j);
        }
        best = std::max(best, acc);
      }
      EXPECT_EQ(two_variation(v), std::sqrt(best)) << "length " << len;
    }
  }
}
