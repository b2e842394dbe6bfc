#pragma once

// Exact trigonometric-polynomial arithmetic and the analytic connection and
// curvature of the m = 2 Sobolev metric at the unit circle (cos θ, sin θ).

#include <vector>

#include "sobcurve/curve.hpp"
#include "sobcurve/metric.hpp"

namespace sobcurve {

// Scalar trigonometric polynomial Σ a_k cos kθ + b_k sin kθ (b_0 = 0).
class TrigSeries {
 public:
  TrigSeries() : a_(1, 0.0), b_(1, 0.0) {}
  explicit TrigSeries(int order) : a_(order + 1, 0.0), b_(order + 1, 0.0) {}
  static TrigSeries constant(double c);

  int order() const { return static_cast<int>(a_.size()) - 1; }
  double cos_coeff(int k) const { return k <= order() ? a_[k] : 0.0; }
  double sin_coeff(int k) const { return k <= order() && k > 0 ? b_[k] : 0.0; }
  void set_cos(int k, double v);
  void set_sin(int k, double v);

  TrigSeries derivative(int times = 1) const;
  double integral() const;  // over [0, 2π]
  double operator()(double theta) const;

  TrigSeries& operator+=(const TrigSeries& o);
  TrigSeries& operator-=(const TrigSeries& o);
  TrigSeries& operator*=(double s);
  // Pointwise product via product-to-sum identities.
  friend TrigSeries operator*(const TrigSeries& x, const TrigSeries& y);

 private:
  void grow(int order);
  std::vector<double> a_, b_;
};

TrigSeries operator+(TrigSeries a, const TrigSeries& b);
TrigSeries operator-(TrigSeries a, const TrigSeries& b);
TrigSeries operator*(double s, TrigSeries a);

// Vector-valued trigonometric polynomial (tangent field or intermediate).
class TrigPolynomial {
 public:
  TrigPolynomial() = default;
  explicit TrigPolynomial(int dim) : comp_(dim) {}
  explicit TrigPolynomial(std::vector<TrigSeries> comps) : comp_(std::move(comps)) {}
  static TrigPolynomial from_curve(const FourierCurve& c);
  FourierCurve to_curve(int order = -1) const;  // order −1: smallest that fits
  static TrigPolynomial unit_circle();

  int dim() const { return static_cast<int>(comp_.size()); }
  int order() const;
  const TrigSeries& operator[](int k) const { return comp_[k]; }
  TrigSeries& operator[](int k) { return comp_[k]; }

  TrigPolynomial derivative(int times = 1) const;
  TrigPolynomial& operator+=(const TrigPolynomial& o);
  TrigPolynomial& operator-=(const TrigPolynomial& o);
  TrigPolynomial& operator*=(double s);

 private:
  std::vector<TrigSeries> comp_;
};

TrigPolynomial operator+(TrigPolynomial a, const TrigPolynomial& b);
TrigPolynomial operator-(TrigPolynomial a, const TrigPolynomial& b);
TrigPolynomial operator*(double s, TrigPolynomial a);
TrigPolynomial operator*(const TrigSeries& f, const TrigPolynomial& v);
TrigSeries dot(const TrigPolynomial& x, const TrigPolynomial& y);

// Assembled F(c, ξ, ζ) at the unit circle (its L² pairing with z is
// D_cg(ζ)(ξ,z) + D_cg(ξ)(ζ,z) − D_cg(z)(ξ,ζ)).
TrigPolynomial christoffel_rhs_circle(const TrigPolynomial& xi, const TrigPolynomial& zeta,
                                      const MetricWeights& weights);
TrigPolynomial christoffel_circle(const TrigPolynomial& xi, const TrigPolynomial& zeta, const MetricWeights& weights);

struct MetricDerivatives {
  double g;    // g_c(ξ, ζ)
  double Dg;   // D_cg(ν)(ξ, ζ)
  double D2g;  // D²_cg(ν, η)(ξ, ζ)
};
MetricDerivatives metric_derivatives_unit_speed(const TrigPolynomial& nu, const TrigPolynomial& eta,
                                                const TrigPolynomial& xi, const TrigPolynomial& zeta,
                                                const MetricWeights& weights);

struct CircleCurvature {
  double numerator;    // g_c(v, R_c(v,w)w)
  double denominator;  // g(v,v)g(w,w) − g(v,w)²
  double kappa;
};
CircleCurvature sectional_curvature_circle(const TrigPolynomial& v, const TrigPolynomial& w,
                                           const MetricWeights& weights);

}  // namespace sobcurve
