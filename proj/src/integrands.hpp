#pragma once

// Per-node integrands of the segment energies, generic in the scalar type so
// that dual numbers give exact derivatives. Jets are flat arrays with entry
// [j*d + k] = k-th component of the j-th θ-derivative.

#include <array>

#include "sobcurve/dual.hpp"
#include "sobcurve/quadrature.hpp"

namespace sobcurve::detail {

inline constexpr int kMaxOrder = 5;
inline constexpr int kMaxDim = 3;

// Taylor coefficients of (V−1)/(1−v²) and (V−1+(1−v²)/(3v²))/(1−v²)² in s = 1−v.
inline constexpr std::array<double, 18> kPhi1Series = {
    -1.0 / 3, -4.0 / 15, -6.0 / 35, -32.0 / 315, -40.0 / 693, -32.0 / 1001,
    -112.0 / 6435, -1024.0 / 109395, -1152.0 / 230945, -2560.0 / 969969, -2816.0 / 2028117,
    -12288.0 / 16900975, -13312.0 / 35102025, -28672.0 / 145422675, -2048.0 / 20036013,
    -524288.0 / 9917826435.0, -557056.0 / 20419054425.0, -393216.0 / 27981667175.0};
inline constexpr std::array<double, 18> kPhi2Series = {
    1.0 / 5, 18.0 / 35, 55.0 / 63, 860.0 / 693, 2065.0 / 1287, 12614.0 / 6435,
    28063.0 / 12155, 122488.0 / 46189, 87923.0 / 29393, 2250050.0 / 676039, 4763187.0 / 1300075,
    20050108.0 / 5014575, 126006361.0 / 29084535, 4207103978.0 / 901620585, 583368787.0 / 116680311,
    36299492624.0 / 6806351475.0, 75107571463.0 / 13254473925.0, 68922740122.0 / 11487210735.0};
inline constexpr double kSeriesCutoff = 0.05;

template <class T>
T horner(const std::array<double, 18>& c, const T& s) {
  T acc(c.back());
  for (int k = static_cast<int>(c.size()) - 2; k >= 0; --k) acc = acc * s + c[k];
  return acc;
}

// V = φ cot φ, v = cos φ = 1 − s, for direct evaluation away from s = 0.
template <class T>
T exact_V_direct(const T& s) {
  using namespace ad;
  const T v = 1.0 - s;
  const T one_m_v2 = s * (2.0 - s);
  return acos(v) * v / sqrt(one_m_v2);
}

template <class T>
T phi1_tail(const T& s) {
  if (ad::value(s) < kSeriesCutoff) return horner(kPhi1Series, s);
  const T one_m_v2 = s * (2.0 - s);
  return (exact_V_direct(s) - 1.0) / one_m_v2;
}

template <class T>
T phi2_tail(const T& s) {
  if (ad::value(s) < kSeriesCutoff) return horner(kPhi2Series, s);
  const T v = 1.0 - s;
  const T one_m_v2 = s * (2.0 - s);
  return (exact_V_direct(s) - 1.0 + one_m_v2 / (3.0 * v * v)) / (one_m_v2 * one_m_v2);
}

template <class T>
T exact_V(const T& s) {
  return 1.0 + s * (2.0 - s) * phi1_tail(s);
}

// Below this v the Ξ·Φ combinations are formed from g = arccos(v)/√(1−v²)
// directly; the tail form loses ~ε/v³ to cancellation as v → 0.
inline constexpr double kSmallV = 0.5;

template <class T>
T acos_ratio(const T& v) {
  using namespace ad;
  return acos(v) / sqrt((1.0 - v) * (1.0 + v));
}

// Φ1ᵀΞ1Θ1, the t-integral of L·Q/D³.
template <class T>
T w2b_integral(const T& r, const T& p, const T& v, const T& f1, const T& rho, const T& sigma, const T& tau) {
  const T rp = r * p;
  const T rp2 = rp * rp;
  const T th0 = (sigma * r * r * r + rho * p * p * p) / (rp2 * rp2);
  const T th1 = ((sigma + 2.0 * tau) * r + (rho + 2.0 * tau) * p) / (rp2 * rp);
  if (ad::value(v) < kSmallV) {
    const T g = acos_ratio(v);
    const T x0 = 2.0 - 3.0 * v - 2.0 * v * v + 3.0 * g;
    const T x1 = 2.0 - v + (1.0 - 2.0 * v) * g;
    return (x0 * th0 + x1 * th1) / (8.0 * (1.0 + v) * (1.0 - v * v));
  }
  const T x0 = (3.0 + 2.0 * v) + 3.0 * f1;
  const T x1 = 1.0 + (1.0 - 2.0 * v) * f1;
  return (x0 * th0 + x1 * th1) / (8.0 * v * (1.0 + v));
}

// Φ2ᵀΞ2Θ2, the t-integral of L·Q²/D⁴.
template <class T>
T w2c_integral(const T& r, const T& p, const T& v, const T& f2, const T& rho, const T& sigma, const T& tau) {
  const T rp = r * p;
  const T rp2 = rp * rp;
  const T rp4 = rp2 * rp2;
  const T r3 = r * r * r, p3 = p * p * p;
  const T th0 = (sigma * sigma * r3 * r * r + rho * rho * p3 * p * p) / (rp4 * rp2);
  const T th1 = (sigma * (sigma + 4.0 * tau) * r3 + rho * (rho + 4.0 * tau) * p3) / (rp4 * rp);
  const T th2 = 2.0 * ((rho * sigma + 2.0 * tau * tau) * (r + p) + 2.0 * tau * (sigma * r + rho * p)) / rp4;
  const T v2 = v * v, v3 = v2 * v;
  if (ad::value(v) < kSmallV) {
    const T g = acos_ratio(v);
    const T om = 1.0 - v2;
    const T x0 = 8.0 - 25.0 * v - 16.0 * v2 + 10.0 * v3 + 8.0 * v2 * v2 + 15.0 * g;
    const T x1 = 8.0 - 5.0 * v + 4.0 * v2 + 2.0 * v3 + (3.0 - 12.0 * v) * g;
    const T x2 = 4.0 - 9.0 * v + 2.0 * v2 + (6.0 * v2 - 6.0 * v + 3.0) * g;
    return (x0 * th0 + x1 * th1 + x2 * th2) / (48.0 * (1.0 + v) * om * om);
  }
  const T x0 = (8.0 * v3 + 10.0 * v2 - 5.0) + 15.0 * v2 * f2;
  const T x1 = (2.0 * v2 + 4.0 * v - 1.0) + (-12.0 * v3 + 3.0 * v2) * f2;
  const T x2 = (2.0 * v - 1.0) + (6.0 * v2 * v2 - 6.0 * v3 + 3.0 * v2) * f2;
  return (x0 * th0 + x1 * th1 + x2 * th2) / (48.0 * v3 * (1.0 + v));
}

template <class T>
T dot(const T* a, const T* b, int d) {
  T s = a[0] * b[0];
  for (int k = 1; k < d; ++k) s += a[k] * b[k];
  return s;
}

struct RatNodeResult {
  bool infinite = false;
};

// Rational (m = 2) integrand. With exact_v the V→1 replacement is undone,
// giving the barW integrand.
template <class T>
T rat_integrand(const T* hat, const T* del, int d, const double* a, bool exact_v, bool* infinite) {
  using namespace ad;
  const T* h1 = hat + d;
  const T* h2 = hat + 2 * d;
  const T* d0 = del;
  const T* d1 = del + d;
  const T* d2 = del + 2 * d;
  std::array<T, kMaxDim> c1, c2;
  for (int k = 0; k < d; ++k) {
    c1[k] = h1[k] + d1[k];
    c2[k] = h2[k] + d2[k];
  }
  const T r2 = dot(h1, h1, d);
  const T r = sqrt(r2);
  const T hd = dot(h1, d1, d);
  const T dp2 = dot(d1, d1, d);
  const T q = r2 + hd;
  if (!(value(q) > 0)) {
    *infinite = true;
    return T(0.0);
  }
  const T p = sqrt(r2 + 2.0 * hd + dp2);
  const T pmr = (2.0 * hd + dp2) / (r + p);
  // s = |ĉ'/r − č'/p|²/2 = 1 − v, assembled without cancellation.
  T s(0.0);
  for (int k = 0; k < d; ++k) {
    const T e = h1[k] * (pmr / (r * p)) - d1[k] / p;
    s += e * e;
  }
  s = 0.5 * s;
  const T v = 1.0 - s;
  const T rho = dot(h1, h2, d);
  const T sigma = dot(c1.data(), c2.data(), d);
  const T tau = 0.5 * (dot(h1, c2.data(), d) + dot(c1.data(), h2, d));

  const T f1 = phi1_tail(s);
  const T f2 = phi2_tail(s);
  const T V = exact_v ? 1.0 + s * (2.0 - s) * f1 : T(1.0);

  T total = a[0] * 0.5 * (r + p) * dot(d0, d0, d);
  // (1/v − 1)(r+p)V + (r−p)log(r/p)
  const T block1 = (s / v) * (r + p) * V + pmr * (-log1p(-pmr / p));
  total += a[1] * block1;
  const T w2a = exact_v ? 0.5 * ((r + p) * V / q + 1.0 / r + 1.0 / p) / (r * p + q)
                        : 0.5 * (1.0 / (r * q) + 1.0 / (p * q));
  const T w2b = w2b_integral(r, p, v, f1, rho, sigma, tau);
  const T w2c = w2c_integral(r, p, v, f2, rho, sigma, tau);
  total += a[2] * (w2a * dot(d2, d2, d) - 2.0 * w2b * dot(d2, d1, d) + w2c * dp2);
  return total;
}

inline constexpr std::array<std::array<int, kMaxOrder + 1>, kMaxOrder + 1> kBinomial = {{
    {1, 0, 0, 0, 0, 0},
    {1, 1, 0, 0, 0, 0},
    {1, 2, 1, 0, 0, 0},
    {1, 3, 3, 1, 0, 0},
    {1, 4, 6, 4, 1, 0},
    {1, 5, 10, 10, 5, 1},
}};

// Regularized integrand for general m. Returns false through *lower_ok when
// L^{−,ε} ≤ 0; *eps_kink flags ε ≥ 2 min(|ĉ'|,|č'|).
template <class T>
T reg_integrand(const T* hat, const T* del, int d, int m, const double* a, double eps, const QuadratureRule& gl,
                bool* lower_ok, bool* eps_kink) {
  using namespace ad;
  const T* h1 = hat + d;
  const T* d1 = del + d;
  const T r2 = dot(h1, h1, d);
  const T r = sqrt(r2);
  const T hd = dot(h1, d1, d);
  const T dp2 = dot(d1, d1, d);
  const T p = sqrt(r2 + 2.0 * hd + dp2);
  const T pmr = (2.0 * hd + dp2) / (r + p);
  const T root = sqrt(pmr * pmr + eps * eps);
  const T upper = r + 0.5 * (pmr + root);
  const T min_eps = r + 0.5 * (pmr - root);
  if (eps >= 2.0 * std::min(value(r), value(p))) *eps_kink = true;
  // |ĉ'/r + č'/p| / 2
  T sum2(0.0);
  for (int k = 0; k < d; ++k) {
    const T e = h1[k] / r + (h1[k] + d1[k]) / p;
    sum2 += e * e;
  }
  const T lower = 0.5 * sqrt(sum2) * max0(min_eps);
  if (!(value(lower) > 0)) {
    *lower_ok = false;
    return T(0.0);
  }

  std::array<T, kMaxOrder + 1> acc;
  acc.fill(T(0.0));
  for (size_t g = 0; g < gl.nodes.size(); ++g) {
    const double t = gl.nodes[g];
    // c^{(k+1)}(t) for k = 0..m−1
    std::array<std::array<T, kMaxDim>, kMaxOrder> cp;
    for (int k = 0; k < m; ++k)
      for (int i = 0; i < d; ++i) cp[k][i] = hat[(k + 1) * d + i] + t * del[(k + 1) * d + i];
    // |c'|² and its θ-derivatives up to order m−1
    std::array<T, kMaxOrder> s2;
    for (int k = 0; k < m; ++k) {
      T acc2(0.0);
      for (int i = 0; i <= k; ++i) acc2 += kBinomial[k][i] * dot(cp[i].data(), cp[k - i].data(), d);
      s2[k] = acc2;
    }
    // P_1 = δ' with derivatives; P_{j+1} = |c'|² ∂P_j − (3j−2)(c'·c'') P_j.
    std::array<std::array<T, kMaxDim>, kMaxOrder> P, Pn;
    int len = m;
    for (int k = 0; k < m; ++k)
      for (int i = 0; i < d; ++i) P[k][i] = del[(k + 1) * d + i];
    for (int j = 1; j <= m; ++j) {
      acc[j] += gl.weights[g] * dot(P[0].data(), P[0].data(), d);
      if (j == m) break;
      const double c = 3.0 * j - 2.0;
      for (int k = 0; k < len - 1; ++k)
        for (int i = 0; i < d; ++i) {
          T val(0.0);
          for (int l = 0; l <= k; ++l) {
            // (c'·c'')^{(l)} = ½ (|c'|²)^{(l+1)}
            val += kBinomial[k][l] * (s2[l] * P[k - l + 1][i] - c * 0.5 * s2[l + 1] * P[k - l][i]);
          }
          Pn[k][i] = val;
        }
      P = Pn;
      --len;
    }
  }
  T total = a[0] * upper * dot(del, del, d);
  for (int j = 1; j <= m; ++j)
    if (a[j] != 0) total += a[j] * ipow(lower, 5 - 6 * j) * acc[j];
  return total;
}

}  // namespace sobcurve::detail
