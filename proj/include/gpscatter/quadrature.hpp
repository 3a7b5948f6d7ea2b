#pragma once

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <vector>

#include "gpscatter/error.hpp"

namespace gpscatter::quad {

struct Rule {
  std::vector<double> x, w;
};

/// N-point Gauss-Legendre rule on [-1, 1], ascending nodes.
template <unsigned N>
const Rule& gauss_legendre() {
  static const Rule rule = [] {
    using G = boost::math::quadrature::gauss<double, N>;
    const auto& a = G::abscissa();
    const auto& w = G::weights();
    Rule r;
    const unsigned start = (N & 1) ? 1 : 0;
    for (unsigned i = static_cast<unsigned>(a.size()); i-- > start;) {
      r.x.push_back(-a[i]);
      r.w.push_back(w[i]);
    }
    if (N & 1) {
      r.x.push_back(0.0);
      r.w.push_back(w[0]);
    }
    for (unsigned i = start; i < a.size(); ++i) {
      r.x.push_back(a[i]);
      r.w.push_back(w[i]);
    }
    return r;
  }();
  return rule;
}

/// Appends the nodes and weights of `rule` mapped to [a, b].
inline void append_panel(const Rule& rule, double a, double b, std::vector<double>& x, std::vector<double>& w) {
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  for (std::size_t i = 0; i < rule.x.size(); ++i) {
    x.push_back(mid + half * rule.x[i]);
    w.push_back(half * rule.w[i]);
  }
}

/// Least squares fit y ~ sum_k c_k basis_k(t) by normal equations on
/// column-scaled data; fine for the handful of smooth basis functions used here.
template <class Basis>
std::vector<double> least_squares(const std::vector<double>& t, const std::vector<double>& y, int nb, Basis&& basis) {
  require(static_cast<int>(t.size()) >= nb, "least squares needs at least as many points as unknowns");
  std::vector<std::vector<double>> A(t.size(), std::vector<double>(nb));
  std::vector<double> scale(nb, 0.0);
  for (std::size_t i = 0; i < t.size(); ++i)
    for (int k = 0; k < nb; ++k) {
      A[i][k] = basis(k, t[i]);
      scale[k] = std::max(scale[k], std::abs(A[i][k]));
    }
  for (auto& row : A)
    for (int k = 0; k < nb; ++k) row[k] /= scale[k] > 0 ? scale[k] : 1.0;
  std::vector<std::vector<double>> M(nb, std::vector<double>(nb + 1, 0.0));
  for (std::size_t i = 0; i < t.size(); ++i)
    for (int a = 0; a < nb; ++a) {
      for (int b = 0; b < nb; ++b) M[a][b] += A[i][a] * A[i][b];
      M[a][nb] += A[i][a] * y[i];
    }
  for (int c = 0; c < nb; ++c) {
    int p = c;
    for (int r = c + 1; r < nb; ++r)
      if (std::abs(M[r][c]) > std::abs(M[p][c])) p = r;
    std::swap(M[c], M[p]);
    if (M[c][c] == 0.0) throw NumericalError("singular least squares system");
    for (int r = 0; r < nb; ++r) {
      if (r == c) continue;
      const double f = M[r][c] / M[c][c];
      for (int k = c; k <= nb; ++k) M[r][k] -= f * M[c][k];
    }
  }
  std::vector<double> c(nb);
  for (int k = 0; k < nb; ++k) c[k] = M[k][nb] / M[k][k] / (scale[k] > 0 ? scale[k] : 1.0);
  return c;
}

/// Slope of log|y| against log x.
inline double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size() && x.size() >= 2, "slope fit needs at least two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(std::abs(y[i]));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace gpscatter::quad
