#pragma once

// Fixed-size tensors for the two-dimensional chart. Templated on the scalar
// so dual numbers flow through contractions and inverses unchanged.

#include <array>
#include <cmath>

#include "finsler/dual.hpp"

namespace finsler {

template <class T>
using Vec2T = std::array<T, 2>;
template <class T>
using Mat2T = std::array<std::array<T, 2>, 2>;
template <class T>
using Ten3T = std::array<std::array<std::array<T, 2>, 2>, 2>;

using Vec2 = Vec2T<double>;
using Mat2 = Mat2T<double>;
using Ten3 = Ten3T<double>;

template <class T>
constexpr Vec2T<T> operator+(const Vec2T<T>& a, const Vec2T<T>& b) {
  return {a[0] + b[0], a[1] + b[1]};
}
template <class T>
constexpr Vec2T<T> operator-(const Vec2T<T>& a, const Vec2T<T>& b) {
  return {a[0] - b[0], a[1] - b[1]};
}
template <class T, class S>
constexpr Vec2T<T> operator*(S s, const Vec2T<T>& a) {
  return {s * a[0], s * a[1]};
}

// Vec2T arithmetic recurses: Mat2T and Ten3T are nested Vec2T, so the same
// elementwise operators cover them.

template <class T>
constexpr T dot(const Vec2T<T>& a, const Vec2T<T>& b) {
  return a[0] * b[0] + a[1] * b[1];
}

inline double norm2(const Vec2& a) { return std::sqrt(dot(a, a)); }

template <class T>
constexpr T det(const Mat2T<T>& m) {
  return m[0][0] * m[1][1] - m[0][1] * m[1][0];
}

template <class T>
constexpr Mat2T<T> inverse(const Mat2T<T>& m) {
  T d = det(m);
  return {{{m[1][1] / d, -m[0][1] / d}, {-m[1][0] / d, m[0][0] / d}}};
}

template <class T>
constexpr Vec2T<T> mul(const Mat2T<T>& m, const Vec2T<T>& v) {
  return {m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]};
}

template <class T>
constexpr Mat2T<T> mul(const Mat2T<T>& a, const Mat2T<T>& b) {
  Mat2T<T> r{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
  return r;
}

// v^T m w
template <class T>
constexpr T quad(const Mat2T<T>& m, const Vec2T<T>& v, const Vec2T<T>& w) {
  return dot(v, mul(m, w));
}

// Solve m x = rhs for symmetric positive definite m.
inline Vec2 solve_spd(const Mat2& m, const Vec2& rhs) {
  double d = det(m);
  return {(m[1][1] * rhs[0] - m[0][1] * rhs[1]) / d,
          (-m[1][0] * rhs[0] + m[0][0] * rhs[1]) / d};
}

inline bool is_positive_definite(const Mat2& m) {
  return m[0][0] > 0.0 && det(m) > 0.0;
}

// Largest |eigenvalue| of g^{-1} h for SPD g and symmetric h; the eigenvalues
// are real because g^{-1} h is similar to a symmetric matrix.
inline double spectral_radius_pencil(const Mat2& g, const Mat2& h) {
  Mat2 b = mul(inverse(g), h);
  double tr = b[0][0] + b[1][1];
  double dt = det(b);
  double disc = tr * tr - 4.0 * dt;
  disc = disc < 0.0 ? 0.0 : disc;  // clip FD noise
  double s = std::sqrt(disc);
  return std::max(std::abs(0.5 * (tr + s)), std::abs(0.5 * (tr - s)));
}

// Largest eigenvalue of an SPD matrix.
inline double max_eigenvalue(const Mat2& m) {
  double tr = m[0][0] + m[1][1];
  double dt = det(m);
  double disc = std::max(tr * tr - 4.0 * dt, 0.0);
  return 0.5 * (tr + std::sqrt(disc));
}

}  // namespace finsler
