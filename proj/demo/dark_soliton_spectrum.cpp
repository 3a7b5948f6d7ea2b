// Scattering data of a dark soliton: the bound state sits at lambda = -sin(phi),
// and the field is reflectionless, so |T_c^{-1}| = 1 on the cut.

#include <cmath>
#include <cstdio>

#include "gpscatter/lax.hpp"

int main() {
  using namespace gpscatter;
  const double phi = 0.5;
  const Grid g = make_grid(40.0, 1024, -20.0);
  const JostSolver solver(make_preset("dark:0.5", g));

  const auto eig = eigenvalues(solver);
  std::printf("bound states (expected lambda = -sin(phi) = %.10f):\n", -std::sin(phi));
  for (const auto& e : eig.eigenvalues) std::printf("  lambda = %.10f   z = %.10f i\n", e.lambda, e.z_im);

  std::printf("\n%8s %16s %16s\n", "xi", "|T(+)|-1", "|T(-)|-1");
  for (const auto& c : cut_samples(solver, {-8.0, -2.0, -0.5, 0.5, 2.0, 8.0}))
    std::printf("%8.2f %16.3e %16.3e\n", c.xi, std::abs(c.plus) - 1.0, std::abs(c.minus) - 1.0);

  std::printf("\n%8s %22s %22s\n", "tau", "Re ln T_c^{-1}(+i s)", "Im ln T_c^{-1}(+i s)");
  for (const auto& a : axis_samples(solver, {3.0, 6.0, 12.0, 24.0}))
    std::printf("%8.1f %22.14e %22.14e\n", a.tau, a.log_plus.real(), a.log_plus.imag());
}
