#pragma once

// Forward-mode dual numbers with a fixed number of directions. Nesting
// (Dual<Dual<double, N>, N>) gives exact second derivatives.

#include <array>
#include <type_traits>
#include <cmath>

namespace sobcurve::ad {

template <class S, int N>
struct Dual {
  S v{};
  std::array<S, N> d{};

  Dual() { d.fill(S(0.0)); }
  Dual(double c) : v(c) { d.fill(S(0.0)); }  // NOLINT: implicit on purpose
  template <class U = S, class = std::enable_if_t<!std::is_same_v<U, double>>>
  Dual(const S& c) : v(c) {  // NOLINT
    d.fill(S(0.0));
  }

  static Dual variable(const S& value, int k) {
    Dual x(value);
    x.d[k] = S(1.0);
    return x;
  }

  Dual& operator+=(const Dual& o) {
    v += o.v;
    for (int i = 0; i < N; ++i) d[i] += o.d[i];
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    v -= o.v;
    for (int i = 0; i < N; ++i) d[i] -= o.d[i];
    return *this;
  }
  Dual& operator*=(const Dual& o) {
    for (int i = 0; i < N; ++i) d[i] = d[i] * o.v + v * o.d[i];
    v *= o.v;
    return *this;
  }
  Dual& operator*=(double s) {
    v *= s;
    for (int i = 0; i < N; ++i) d[i] *= s;
    return *this;
  }
  Dual& operator/=(const Dual& o) {
    v /= o.v;
    for (int i = 0; i < N; ++i) d[i] = (d[i] - v * o.d[i]) / o.v;
    return *this;
  }
};

template <class T>
struct is_dual : std::false_type {};
template <class S, int N>
struct is_dual<Dual<S, N>> : std::true_type {};

inline double value(double x) { return x; }
template <class S, int N>
double value(const Dual<S, N>& x) {
  return value(x.v);
}

// Applies f with f(v) known and f'(v) = df.
template <class S, int N>
Dual<S, N> chain(const Dual<S, N>& x, const S& fv, const S& df) {
  Dual<S, N> r;
  r.v = fv;
  for (int i = 0; i < N; ++i) r.d[i] = df * x.d[i];
  return r;
}

template <class S, int N>
Dual<S, N> operator+(Dual<S, N> a, const Dual<S, N>& b) { return a += b; }
template <class S, int N>
Dual<S, N> operator-(Dual<S, N> a, const Dual<S, N>& b) { return a -= b; }
template <class S, int N>
Dual<S, N> operator*(Dual<S, N> a, const Dual<S, N>& b) { return a *= b; }
template <class S, int N>
Dual<S, N> operator/(Dual<S, N> a, const Dual<S, N>& b) { return a /= b; }
template <class S, int N>
Dual<S, N> operator-(Dual<S, N> a) { return a *= -1.0; }

template <class S, int N>
Dual<S, N> operator+(Dual<S, N> a, double b) { a.v += b; return a; }
template <class S, int N>
Dual<S, N> operator+(double b, Dual<S, N> a) { a.v += b; return a; }
template <class S, int N>
Dual<S, N> operator-(Dual<S, N> a, double b) { a.v -= b; return a; }
template <class S, int N>
Dual<S, N> operator-(double b, const Dual<S, N>& a) { return -a + b; }
template <class S, int N>
Dual<S, N> operator*(Dual<S, N> a, double b) { return a *= b; }
template <class S, int N>
Dual<S, N> operator*(double b, Dual<S, N> a) { return a *= b; }
template <class S, int N>
Dual<S, N> operator/(Dual<S, N> a, double b) { return a *= 1.0 / b; }
template <class S, int N>
Dual<S, N> operator/(double b, const Dual<S, N>& a) { return Dual<S, N>(b) / a; }

template <class S, int N>
bool operator<(const Dual<S, N>& a, double b) { return value(a) < b; }
template <class S, int N>
bool operator>(const Dual<S, N>& a, double b) { return value(a) > b; }
template <class S, int N>
bool operator<=(const Dual<S, N>& a, double b) { return value(a) <= b; }
template <class S, int N>
bool operator>=(const Dual<S, N>& a, double b) { return value(a) >= b; }

using std::acos;
using std::atan;
using std::exp;
using std::log;
using std::log1p;
using std::sqrt;

template <class S, int N>
Dual<S, N> sqrt(const Dual<S, N>& x) {
  const S s = sqrt(x.v);
  return chain(x, s, S(0.5) / s);
}
template <class S, int N>
Dual<S, N> log(const Dual<S, N>& x) { return chain(x, log(x.v), S(1.0) / x.v); }
template <class S, int N>
Dual<S, N> log1p(const Dual<S, N>& x) { return chain(x, log1p(x.v), S(1.0) / (S(1.0) + x.v)); }
template <class S, int N>
Dual<S, N> exp(const Dual<S, N>& x) {
  const S e = exp(x.v);
  return chain(x, e, e);
}
template <class S, int N>
Dual<S, N> atan(const Dual<S, N>& x) { return chain(x, atan(x.v), S(1.0) / (S(1.0) + x.v * x.v)); }
template <class S, int N>
Dual<S, N> acos(const Dual<S, N>& x) { return chain(x, acos(x.v), S(-1.0) / sqrt(S(1.0) - x.v * x.v)); }

// x^k for integer k (negative allowed).
template <class T>
T ipow(const T& x, int k) {
  if (k < 0) return T(1.0) / ipow(x, -k);
  T r(1.0), b = x;
  while (k) {
    if (k & 1) r = r * b;
    b = b * b;
    k >>= 1;
  }
  return r;
}

template <class T>
T max0(const T& x) {
  return value(x) > 0 ? x : T(0.0);
}

}  // namespace sobcurve::ad
