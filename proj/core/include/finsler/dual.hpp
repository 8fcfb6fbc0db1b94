#pragma once

// Forward-mode dual numbers, nestable to arbitrary depth.
//
// Fiberwise derivatives of the metric energy F^2 are taken by evaluating the
// closed-form metric with Dual-valued fiber coordinates: Dual<double> gives
// first y-derivatives, Dual<Dual<double>> second, and so on. All chain rules
// are exact to machine precision, which matters because the Cartan tensor
// sits three derivative levels deep.

#include <cmath>
#include <type_traits>

namespace finsler {

template <class T>
struct Dual {
  T v{};  // value
  T d{};  // derivative

  constexpr Dual() = default;
  constexpr Dual(T value) : v(value) {}  // NOLINT: implicit promotion wanted
  constexpr Dual(T value, T deriv) : v(value), d(deriv) {}
  // Ground plain constants at any nesting depth.
  template <class U = T>
    requires(!std::is_same_v<U, double>)
  constexpr Dual(double value) : v(value) {}  // NOLINT

  constexpr Dual& operator+=(const Dual& o) { v += o.v; d += o.d; return *this; }
  constexpr Dual& operator-=(const Dual& o) { v -= o.v; d -= o.d; return *this; }
};

using Dual1 = Dual<double>;
using Dual2 = Dual<Dual<double>>;
using Dual3 = Dual<Dual<Dual<double>>>;

template <class T> struct is_dual : std::false_type {};
template <class T> struct is_dual<Dual<T>> : std::true_type {};

// Recursive extraction of the underlying value.
inline double value_of(double x) { return x; }
template <class T>
double value_of(const Dual<T>& x) { return value_of(x.v); }

template <class T>
constexpr Dual<T> operator+(const Dual<T>& a, const Dual<T>& b) { return {a.v + b.v, a.d + b.d}; }
template <class T>
constexpr Dual<T> operator-(const Dual<T>& a, const Dual<T>& b) { return {a.v - b.v, a.d - b.d}; }
template <class T>
constexpr Dual<T> operator-(const Dual<T>& a) { return {-a.v, -a.d}; }
template <class T>
constexpr Dual<T> operator*(const Dual<T>& a, const Dual<T>& b) {
  return {a.v * b.v, a.d * b.v + a.v * b.d};
}
template <class T>
constexpr Dual<T> operator/(const Dual<T>& a, const Dual<T>& b) {
  T q = a.v / b.v;
  return {q, (a.d - q * b.d) / b.v};
}

// Mixed scalar arithmetic; grounds the recursion at double.
template <class T>
constexpr Dual<T> operator+(const Dual<T>& a, double b) { return {a.v + b, a.d}; }
template <class T>
constexpr Dual<T> operator+(double a, const Dual<T>& b) { return {a + b.v, b.d}; }
template <class T>
constexpr Dual<T> operator-(const Dual<T>& a, double b) { return {a.v - b, a.d}; }
template <class T>
constexpr Dual<T> operator-(double a, const Dual<T>& b) { return {a - b.v, -b.d}; }
template <class T>
constexpr Dual<T> operator*(const Dual<T>& a, double b) { return {a.v * b, a.d * b}; }
template <class T>
constexpr Dual<T> operator*(double a, const Dual<T>& b) { return {b.v * a, b.d * a}; }
template <class T>
constexpr Dual<T> operator/(const Dual<T>& a, double b) { return {a.v / b, a.d / b}; }
template <class T>
constexpr Dual<T> operator/(double a, const Dual<T>& b) {
  T q = a / b.v;
  return {q, (-q * b.d) / b.v};
}

using std::cos;
using std::exp;
using std::log;
using std::sin;
using std::sqrt;

template <class T>
Dual<T> sqrt(const Dual<T>& a) {
  T r = sqrt(a.v);
  return {r, a.d / (2.0 * r)};
}
template <class T>
Dual<T> exp(const Dual<T>& a) {
  T e = exp(a.v);
  return {e, a.d * e};
}
template <class T>
Dual<T> log(const Dual<T>& a) {
  return {log(a.v), a.d / a.v};
}
template <class T>
Dual<T> sin(const Dual<T>& a) {
  return {sin(a.v), a.d * cos(a.v)};
}
template <class T>
Dual<T> cos(const Dual<T>& a) {
  return {cos(a.v), -a.d * sin(a.v)};
}

}  // namespace finsler
