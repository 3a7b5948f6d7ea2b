#pragma once

// Fourth-order Magnus stepping for 2x2 affine systems y' = B(x) y + c(x).
//
// The affine system is the 3x3 linear system on (y, 1), so the Magnus
// expansion applies unchanged; the exponential of the augmented generator is
// (e^B, phi1(B) c) with phi1(X) = (e^X - I)/X, evaluated without forming the
// quotient. Integrating the deviation from a known solution this way keeps
// the result accurate relative to the deviation itself.

#include <array>
#include <cmath>
#include <complex>

#include "gpscatter/fft.hpp"

namespace gpscatter::magnus {

struct Mat2 {
  cplx a{}, b{}, c{}, d{};  // [[a, b], [c, d]]
};

struct Vec2 {
  cplx x{}, y{};
};

inline Mat2 operator+(const Mat2& p, const Mat2& q) { return {p.a + q.a, p.b + q.b, p.c + q.c, p.d + q.d}; }
inline Mat2 operator-(const Mat2& p, const Mat2& q) { return {p.a - q.a, p.b - q.b, p.c - q.c, p.d - q.d}; }
inline Mat2 operator*(cplx s, const Mat2& p) { return {s * p.a, s * p.b, s * p.c, s * p.d}; }
inline Mat2 operator*(const Mat2& p, const Mat2& q) {
  return {p.a * q.a + p.b * q.c, p.a * q.b + p.b * q.d, p.c * q.a + p.d * q.c, p.c * q.b + p.d * q.d};
}
inline Vec2 operator*(const Mat2& p, const Vec2& v) { return {p.a * v.x + p.b * v.y, p.c * v.x + p.d * v.y}; }
inline Vec2 operator+(const Vec2& u, const Vec2& v) { return {u.x + v.x, u.y + v.y}; }
inline Vec2 operator-(const Vec2& u, const Vec2& v) { return {u.x - v.x, u.y - v.y}; }
inline Vec2 operator*(cplx s, const Vec2& v) { return {s * v.x, s * v.y}; }

inline double norm1(const Mat2& m) {
  return std::max(std::abs(m.a) + std::abs(m.c), std::abs(m.b) + std::abs(m.d));
}

/// Generator of an affine flow.
struct Affine {
  Mat2 B;
  Vec2 c;
};

inline Affine operator+(const Affine& p, const Affine& q) { return {p.B + q.B, p.c + q.c}; }
inline Affine operator-(const Affine& p, const Affine& q) { return {p.B - q.B, p.c - q.c}; }
inline Affine operator*(cplx s, const Affine& p) { return {s * p.B, s * p.c}; }

/// Commutator of the augmented 3x3 matrices, again of affine form.
inline Affine commutator(const Affine& p, const Affine& q) {
  return {p.B * q.B - q.B * p.B, p.B * q.c - q.B * p.c};
}

/// e^B for a 2x2 matrix via B = mI + N, N^2 = s^2 I.
inline Mat2 expm(const Mat2& B) {
  const cplx m = 0.5 * (B.a + B.d);
  const Mat2 N{B.a - m, B.b, B.c, B.d - m};
  const cplx s2 = N.a * N.a + N.b * N.c;
  cplx ch, shc;
  if (std::abs(s2) < 1e-8) {
    ch = 1.0 + s2 / 2.0 + s2 * s2 / 24.0;
    shc = 1.0 + s2 / 6.0 + s2 * s2 / 120.0;
  } else {
    const cplx s = std::sqrt(s2);
    ch = std::cosh(s);
    shc = std::sinh(s) / s;
  }
  const cplx em = std::exp(m);
  return {em * (ch + shc * N.a), em * shc * N.b, em * shc * N.c, em * (ch + shc * N.d)};
}

/// Flow of the constant affine generator over unit time: y -> E y + v.
struct AffineMap {
  Mat2 E;
  Vec2 v;
  Vec2 operator()(const Vec2& y) const { return E * y + v; }
};

inline AffineMap exp_affine(const Affine& g) {
  int halvings = 0;
  double nrm = norm1(g.B);
  while (nrm > 0.5) {
    nrm *= 0.5;
    ++halvings;
  }
  const double scale = std::ldexp(1.0, -halvings);
  const Mat2 X = scale * g.B;
  const Vec2 c = scale * g.c;
  // phi1(X) c = sum_k X^k c / (k+1)!, Horner form.
  constexpr int K = 14;
  static const std::array<double, K + 2> inv_fact = [] {
    std::array<double, K + 2> f{};
    f[0] = 1.0;
    for (int k = 1; k < K + 2; ++k) f[k] = f[k - 1] / k;
    return f;
  }();
  Vec2 v = inv_fact[K + 1] * c;
  for (int k = K - 1; k >= 0; --k) v = X * v + inv_fact[k + 1] * c;
  Mat2 E = expm(X);
  for (int i = 0; i < halvings; ++i) {
    v = 0.5 * (E * v + v);
    E = E * E;
  }
  return {E, v};
}

/// One fourth-order Magnus step of length h from generators sampled at the
/// start, midpoint and end of the step (Simpson moments).
inline AffineMap step(const Affine& A1, const Affine& A2, const Affine& A3, double h) {
  Affine omega = (h / 6.0) * (A1 + 4.0 * A2 + A3);
  const Affine corr = commutator(A2, A3 - A1);
  omega = omega - (h * h / 12.0) * corr;
  return exp_affine(omega);
}

}  // namespace gpscatter::magnus
