#include "sobcurve/oracle.hpp"

#include <cmath>

#include "sobcurve/errors.hpp"

namespace sobcurve {

namespace {
void check_m2(const MetricWeights& w) {
  if (w.m != 2) throw Error(ErrorCode::InvalidArgument, "circle oracle is derived for m = 2 only");
}
}  // namespace

TrigSeries TrigSeries::constant(double c) {
  TrigSeries s;
  s.a_[0] = c;
  return s;
}

void TrigSeries::grow(int order) {
  if (order > this->order()) {
    a_.resize(order + 1, 0.0);
    b_.resize(order + 1, 0.0);
  }
}

void TrigSeries::set_cos(int k, double v) {
  grow(k);
  a_[k] = v;
}

void TrigSeries::set_sin(int k, double v) {
  if (k == 0) throw Error(ErrorCode::InvalidArgument, "sin(0θ) has no coefficient");
  grow(k);
  b_[k] = v;
}

TrigSeries TrigSeries::derivative(int times) const {
  TrigSeries out = *this;
  for (int t = 0; t < times; ++t) {
    TrigSeries next(order());
    for (int k = 1; k <= order(); ++k) {
      next.a_[k] = k * out.b_[k];
      next.b_[k] = -k * out.a_[k];
    }
    out = next;
  }
  return out;
}

double TrigSeries::integral() const { return 2.0 * M_PI * a_[0]; }

double TrigSeries::operator()(double theta) const {
  double s = a_[0];
  for (int k = 1; k <= order(); ++k) s += a_[k] * std::cos(k * theta) + b_[k] * std::sin(k * theta);
  return s;
}

TrigSeries& TrigSeries::operator+=(const TrigSeries& o) {
  grow(o.order());
  for (int k = 0; k <= o.order(); ++k) {
    a_[k] += o.a_[k];
    b_[k] += o.b_[k];
  }
  return *this;
}

TrigSeries& TrigSeries::operator-=(const TrigSeries& o) {
  grow(o.order());
  for (int k = 0; k <= o.order(); ++k) {
    a_[k] -= o.a_[k];
    b_[k] -= o.b_[k];
  }
  return *this;
}

TrigSeries& TrigSeries::operator*=(double s) {
  for (auto& x : a_) x *= s;
  for (auto& x : b_) x *= s;
  return *this;
}

TrigSeries operator*(const TrigSeries& x, const TrigSeries& y) {
  TrigSeries out(x.order() + y.order());
  auto add_cos = [&](int n, double c) { out.a_[std::abs(n)] += c; };
  auto add_sin = [&](int n, double c) {
    if (n > 0) out.b_[n] += c;
    else if (n < 0) out.b_[-n] -= c;
  };
  for (int j = 0; j <= x.order(); ++j)
    for (int k = 0; k <= y.order(); ++k) {
      const double ca = x.a_[j], sa = x.b_[j], cb = y.a_[k], sb = y.b_[k];
      // cos j cos k = ½[cos(j−k) + cos(j+k)], sin j sin k = ½[cos(j−k) − cos(j+k)],
      // sin j cos k = ½[sin(j+k) + sin(j−k)].
      if (ca != 0 && cb != 0) {
        add_cos(j - k, 0.5 * ca * cb);
        add_cos(j + k, 0.5 * ca * cb);
      }
      if (sa != 0 && sb != 0) {
        add_cos(j - k, 0.5 * sa * sb);
        add_cos(j + k, -0.5 * sa * sb);
      }
      if (sa != 0 && cb != 0) {
        add_sin(j + k, 0.5 * sa * cb);
        add_sin(j - k, 0.5 * sa * cb);
      }
      if (ca != 0 && sb != 0) {
        add_sin(k + j, 0.5 * sb * ca);
        add_sin(k - j, 0.5 * sb * ca);
      }
    }
  return out;
}

TrigSeries operator+(TrigSeries a, const TrigSeries& b) { return a += b; }
TrigSeries operator-(TrigSeries a, const TrigSeries& b) { return a -= b; }
TrigSeries operator*(double s, TrigSeries a) { return a *= s; }

TrigPolynomial TrigPolynomial::from_curve(const FourierCurve& c) {
  TrigPolynomial out(c.dim());
  for (int i = 0; i < c.dim(); ++i) {
    TrigSeries s(c.order());
    for (int k = 0; k <= c.order(); ++k) {
      s.set_cos(k, c.cos_coeff(k)(i));
      if (k > 0) s.set_sin(k, c.sin_coeff(k)(i));
    }
    out.comp_[i] = s;
  }
  return out;
}

int TrigPolynomial::order() const {
  int n = 0;
  for (const auto& s : comp_) n = std::max(n, s.order());
  return n;
}

FourierCurve TrigPolynomial::to_curve(int order) const {
  const int N = order < 0 ? this->order() : order;
  FourierCurve c(dim(), N);
  for (int i = 0; i < dim(); ++i)
    for (int k = 0; k <= N; ++k) {
      c.matrix()(k == 0 ? 0 : 2 * k - 1, i) = comp_[i].cos_coeff(k);
      if (k > 0) c.matrix()(2 * k, i) = comp_[i].sin_coeff(k);
    }
  return c;
}

TrigPolynomial TrigPolynomial::unit_circle() {
  TrigSeries x(1), y(1);
  x.set_cos(1, 1.0);
  y.set_sin(1, 1.0);
  return TrigPolynomial({x, y});
}

TrigPolynomial TrigPolynomial::derivative(int times) const {
  TrigPolynomial out(dim());
  for (int i = 0; i < dim(); ++i) out.comp_[i] = comp_[i].derivative(times);
  return out;
}

TrigPolynomial& TrigPolynomial::operator+=(const TrigPolynomial& o) {
  for (int i = 0; i < dim(); ++i) comp_[i] += o.comp_[i];
  return *this;
}

TrigPolynomial& TrigPolynomial::operator-=(const TrigPolynomial& o) {
  for (int i = 0; i < dim(); ++i) comp_[i] -= o.comp_[i];
  return *this;
}

TrigPolynomial& TrigPolynomial::operator*=(double s) {
  for (auto& c : comp_) c *= s;
  return *this;
}

TrigPolynomial operator+(TrigPolynomial a, const TrigPolynomial& b) { return a += b; }
TrigPolynomial operator-(TrigPolynomial a, const TrigPolynomial& b) { return a -= b; }
TrigPolynomial operator*(double s, TrigPolynomial a) { return a *= s; }

TrigPolynomial operator*(const TrigSeries& f, const TrigPolynomial& v) {
  TrigPolynomial out(v.dim());
  for (int i = 0; i < v.dim(); ++i) out[i] = f * v[i];
  return out;
}

TrigSeries dot(const TrigPolynomial& x, const TrigPolynomial& y) {
  TrigSeries s;
  for (int i = 0; i < x.dim(); ++i) s += x[i] * y[i];
  return s;
}

TrigPolynomial christoffel_rhs_circle(const TrigPolynomial& xi, const TrigPolynomial& zeta,
                                      const MetricWeights& weights) {
  check_m2(weights);
  const double a0 = weights.a[0], a1 = weights.a[1], a2 = weights.a[2];
  const TrigPolynomial c1 = TrigPolynomial::unit_circle().derivative();
  auto half = [&](const TrigPolynomial& x, const TrigPolynomial& y) {
    // a0(c'·y')x + a1((c'·y')x')' − 3a2((c'·y')x'')'' − a2((c'·y')''x')'
    const TrigSeries cy = dot(c1, y.derivative());
    const TrigPolynomial x1 = x.derivative(), x2 = x.derivative(2);
    return a0 * (cy * x) + a1 * (cy * x1).derivative() - 3 * a2 * (cy * x2).derivative(2) -
           a2 * (cy.derivative(2) * x1).derivative();
  };
  TrigPolynomial F = half(xi, zeta) + half(zeta, xi);
  const TrigSeries s0 = dot(xi, zeta);
  const TrigSeries s1 = dot(xi.derivative(), zeta.derivative());
  const TrigSeries s2 = dot(xi.derivative(2), zeta.derivative(2));
  F += (a0 * (s0 * c1)).derivative() - a1 * (s1 * c1).derivative() - 3 * a2 * (s2 * c1).derivative() +
       a2 * (s1.derivative(2) * c1).derivative();
  return F;
}

TrigPolynomial christoffel_circle(const TrigPolynomial& xi, const TrigPolynomial& zeta,
                                  const MetricWeights& weights) {
  const TrigPolynomial F = christoffel_rhs_circle(xi, zeta, weights);
  const double a0 = weights.a[0], a1 = weights.a[1], a2 = weights.a[2];
  TrigPolynomial out(F.dim());
  for (int i = 0; i < F.dim(); ++i) {
    TrigSeries s(F[i].order());
    for (int k = 0; k <= F[i].order(); ++k) {
      const double kk = static_cast<double>(k) * k;
      const double den = 2.0 * (a0 + a1 * kk + a2 * kk * kk);
      s.set_cos(k, F[i].cos_coeff(k) / den);
      if (k > 0) s.set_sin(k, F[i].sin_coeff(k) / den);
    }
    out[i] = s;
  }
  return out;
}

MetricDerivatives metric_derivatives_unit_speed(const TrigPolynomial& nu, const TrigPolynomial& eta,
                                                const TrigPolynomial& xi, const TrigPolynomial& zeta,
                                                const MetricWeights& weights) {
  check_m2(weights);
  const double a0 = weights.a[0], a1 = weights.a[1], a2 = weights.a[2];
  const TrigPolynomial c1 = TrigPolynomial::unit_circle().derivative();
  const TrigSeries s0 = dot(xi, zeta);
  const TrigSeries s1 = dot(xi.derivative(), zeta.derivative());
  const TrigSeries s2 = dot(xi.derivative(2), zeta.derivative(2));
  MetricDerivatives out;
  out.g = (a0 * s0 + a1 * s1 + a2 * s2).integral();

  const TrigSeries cn = dot(c1, nu.derivative());
  out.Dg = (cn * (a0 * s0 - a1 * s1 - 3 * a2 * s2) - a2 * (cn.derivative() * s1.derivative())).integral();

  const TrigSeries ce = dot(c1, eta.derivative());
  const TrigSeries P = dot(nu.derivative(), eta.derivative());
  const TrigSeries Q = cn * ce;
  out.D2g = (a0 * ((P - Q) * s0) - a1 * ((P - 3 * Q) * s1) - a2 * ((3 * P - 15 * Q) * s2) +
             2 * a2 * (cn.derivative() * ce.derivative() * s1) -
             a2 * ((P.derivative() - 5 * Q.derivative()) * s1.derivative()))
                .integral();
  return out;
}

CircleCurvature sectional_curvature_circle(const TrigPolynomial& v, const TrigPolynomial& w,
                                           const MetricWeights& weights) {
  check_m2(weights);
  const TrigPolynomial zero(v.dim());
  auto g = [&](const TrigPolynomial& x, const TrigPolynomial& y) {
    return metric_derivatives_unit_speed(zero, zero, x, y, weights).g;
  };
  auto Dg = [&](const TrigPolynomial& n, const TrigPolynomial& x, const TrigPolynomial& y) {
    return metric_derivatives_unit_speed(n, zero, x, y, weights).Dg;
  };
  auto D2g = [&](const TrigPolynomial& n, const TrigPolynomial& e, const TrigPolynomial& x, const TrigPolynomial& y) {
    return metric_derivatives_unit_speed(n, e, x, y, weights).D2g;
  };
  // g(zp, DΓ(a,b)(n)) from differentiating the Christoffel identity.
  auto gDGamma = [&](const TrigPolynomial& zp, const TrigPolynomial& a, const TrigPolynomial& b,
                     const TrigPolynomial& n) {
    return 0.5 * (D2g(n, b, a, zp) + D2g(n, a, b, zp) - D2g(n, zp, a, b)) -
           Dg(n, christoffel_circle(a, b, weights), zp);
  };
  const TrigPolynomial& z = w;
  const TrigPolynomial Gzw = christoffel_circle(z, w, weights);
  const TrigPolynomial Gzv = christoffel_circle(z, v, weights);
  CircleCurvature out;
  out.numerator = gDGamma(v, z, w, v) - gDGamma(v, z, v, w) + 0.5 * Dg(Gzw, v, v) + 0.5 * Dg(v, Gzv, w) -
                  0.5 * Dg(w, Gzv, v) - 0.5 * Dg(Gzv, w, v);
  const double gvv = g(v, v), gww = g(w, w), gvw = g(v, w);
  out.denominator = gvv * gww - gvw * gvw;
  const double scale = gvv * gww;
  if (!(out.denominator > 1e-12 * scale)) throw Error(ErrorCode::DegeneratePlane, "v and w are linearly dependent");
  out.kappa = out.numerator / out.denominator;
  return out;
}

}  // namespace sobcurve
