// The conserved energies of a small bump: Hamiltonians from the trace formula
// against their direct evaluation, and E^s_tau for a few s.

#include <cstdio>

#include "gpscatter/energies.hpp"

int main() {
  using namespace gpscatter;
  const Grid g = make_grid(40.0, 1024, -20.0);
  const GPField q = make_preset("bump:0.1:1", g);
  const JostSolver solver(q);
  EnergyCalculator calc(solver);

  const auto h2 = calc.hamiltonian(0);
  std::printf("H^2 trace formula %.12f   2 E_GL direct %.12f\n", h2.value, 2.0 * ginzburg_landau(q));
  std::printf("H^4 trace formula %.12f\n", calc.hamiltonian(1).value);

  const double tau = 4.0;
  std::printf("\n%6s %18s %18s %12s\n", "s", "E^s_tau", "(E^s_tau norm)^2", "ratio - 1");
  for (const double s : {1.0, 1.25, 1.5, 2.0}) {
    const auto e = calc.equivalence(s, tau);
    std::printf("%6.2f %18.10e %18.10e %12.3e\n", s, e.energy, e.norm_squared, e.ratio - 1.0);
  }
}
