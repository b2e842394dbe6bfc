#include "sobcurve/energy.hpp"

#include <atomic>
#include <cmath>
#include <iostream>

#include "integrands.hpp"
#include "sobcurve/errors.hpp"

namespace sobcurve {

using detail::kMaxDim;
using detail::kMaxOrder;

EnergyKind EnergyKind::reg(double eps) {
  if (!(eps > 0)) throw Error(ErrorCode::InvalidArgument, "Reg energy needs epsilon > 0");
  EnergyKind k;
  k.type = Type::Reg;
  k.epsilon = eps;
  return k;
}

double EnergyValue::value() const {
  if (!finite_) throw Error(ErrorCode::InfiniteEnergy, "energy is infinite (q <= 0 at some node)");
  return value_;
}

SmoothMaxMin smooth_max_min(double alpha, double beta, double eps) {
  if (!(eps > 0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
  const double diff = beta - alpha;
  const double root = std::hypot(diff, eps);
  SmoothMaxMin out;
  out.max = alpha + 0.5 * (diff + root);
  out.min = alpha + 0.5 * (diff - root);
  out.min_clamped = std::max(0.0, out.min);
  return out;
}

LengthBounds length_bounds(const SampledJet& hat, const SampledJet& check, double eps) {
  if (hat.num_nodes != check.num_nodes || hat.max_order < 1 || check.max_order < 1)
    throw Error(ErrorCode::InvalidArgument, "length_bounds needs first-order jets on one grid");
  const int M = hat.num_nodes;
  LengthBounds lb;
  lb.upper.resize(M);
  lb.lower.resize(M);
  for (int i = 0; i < M; ++i) {
    const Eigen::VectorXd a = hat.order(1).row(i), b = check.order(1).row(i);
    const double r = a.norm(), p = b.norm();
    if (r <= kSpeedFloor || p <= kSpeedFloor) throw Error(ErrorCode::DegenerateCurve, "speed below floor");
    const SmoothMaxMin mm = smooth_max_min(r, p, eps);
    lb.upper(i) = mm.max;
    lb.lower(i) = 0.5 * (a / r + b / p).norm() * mm.min_clamped;
  }
  return lb;
}

std::vector<RationalCoefficients> rational_coefficients(const SampledJet& hat, const SampledJet& check) {
  if (hat.num_nodes != check.num_nodes || hat.max_order < 2 || check.max_order < 2)
    throw Error(ErrorCode::InvalidArgument, "rational_coefficients needs second-order jets on one grid");
  std::vector<RationalCoefficients> out(hat.num_nodes);
  for (int i = 0; i < hat.num_nodes; ++i) {
    const Eigen::VectorXd h1 = hat.order(1).row(i), h2 = hat.order(2).row(i);
    const Eigen::VectorXd c1 = check.order(1).row(i), c2 = check.order(2).row(i);
    RationalCoefficients& rc = out[i];
    rc.r = h1.norm();
    rc.p = c1.norm();
    rc.q = h1.dot(c1);
    if (!(rc.q > 0)) throw Error(ErrorCode::NonPositiveQ, "q <= 0 at node " + std::to_string(i));
    rc.rho = h1.dot(h2);
    rc.sigma = c1.dot(c2);
    rc.tau = 0.5 * (h1.dot(c2) + c1.dot(h2));
    const double s = 0.5 * (h1 / rc.r - c1 / rc.p).squaredNorm();
    rc.v = 1.0 - s;
    rc.u = rc.r * rc.p * std::sqrt(s * (2.0 - s));
    rc.V = detail::exact_V(s);
    const double f1 = detail::phi1_tail(s), f2 = detail::phi2_tail(s);
    const double v = rc.v, v2 = v * v, v3 = v2 * v;
    rc.Phi1 << 1.0, f1;
    rc.Phi2 << 1.0, f2;
    rc.Xi1 << 3 + 2 * v, 1, 3, 1 - 2 * v;
    rc.Xi1 /= 8 * v * (1 + v);
    rc.Xi2 << 8 * v3 + 10 * v2 - 5, 2 * v2 + 4 * v - 1, 2 * v - 1, 15 * v2, -12 * v3 + 3 * v2,
        6 * v2 * v2 - 6 * v3 + 3 * v2;
    rc.Xi2 /= 48 * v3 * (1 + v);
    const double r = rc.r, p = rc.p, rp = r * p, rho = rc.rho, sg = rc.sigma, tau = rc.tau;
    rc.Theta1 << sg * r * r * r + rho * p * p * p, rp * ((sg + 2 * tau) * r + (rho + 2 * tau) * p);
    rc.Theta1 /= std::pow(rp, 4);
    rc.Theta2 << sg * sg * std::pow(r, 5) + rho * rho * std::pow(p, 5),
        rp * (sg * (sg + 4 * tau) * r * r * r + rho * (rho + 4 * tau) * p * p * p),
        2 * rp * rp * ((rho * sg + 2 * tau * tau) * (r + p) + 2 * tau * (sg * r + rho * p));
    rc.Theta2 /= std::pow(rp, 6);
  }
  return out;
}

TimeIntegrals closed_form_time_integrals(double r, double p, double q, double rho, double sigma, double tau) {
  if (!(q > 0) || !(q < r * p)) throw Error(ErrorCode::InvalidArgument, "closed forms need 0 < q < rp");
  const double v = q / (r * p);
  const double s = 1.0 - v;
  const double V = detail::exact_V(s);
  TimeIntegrals I;
  I.w0 = 0.5 * (r + p);
  I.w1 = ((s / v) * (r + p) * V + (r - p) * std::log1p((r - p) / p)) / (r * r + p * p - 2 * q);
  I.w2a = 0.5 * ((r + p) * V / q + 1 / r + 1 / p) / (r * p + q);
  I.w2b = detail::w2b_integral(r, p, v, detail::phi1_tail(s), rho, sigma, tau);
  I.w2c = detail::w2c_integral(r, p, v, detail::phi2_tail(s), rho, sigma, tau);
  return I;
}

TimeIntegrals quadrature_time_integrals(double r, double p, double q, double rho, double sigma, double tau,
                                        int nodes) {
  const QuadratureRule gl = gauss_legendre(nodes);
  TimeIntegrals I{0, 0, 0, 0, 0};
  for (int k = 0; k < nodes; ++k) {
    const double t = gl.nodes[k], s = 1 - t, w = gl.weights[k];
    const double L = s * r + t * p;
    const double D = s * s * r * r + 2 * s * t * q + t * t * p * p;
    const double Q = rho * s * s + sigma * t * t + 2 * tau * s * t;
    I.w0 += w * L;
    I.w1 += w * L / D;
    I.w2a += w * L / (D * D);
    I.w2b += w * L * Q / (D * D * D);
    I.w2c += w * L * Q * Q / (D * D * D * D);
  }
  return I;
}

// ---------------------------------------------------------------------------

namespace {

std::atomic<bool> g_eps_warned{false};

void warn_eps_kink(double eps) {
  if (!g_eps_warned.exchange(true))
    std::cerr << "warning: epsilon = " << eps
              << " reaches 2*min speed; the clamp in the smoothed lower bound may be active\n";
}

// Calls f.template operator()<N>() for the compile-time N matching n.
template <class F>
decltype(auto) dispatch(int n, F&& f) {
  switch (n) {
    case 1: return f.template operator()<1>();
    case 6: return f.template operator()<6>();
    case 8: return f.template operator()<8>();
    case 9: return f.template operator()<9>();
    case 10: return f.template operator()<10>();
    case 12: return f.template operator()<12>();
    case 15: return f.template operator()<15>();
    case 16: return f.template operator()<16>();
    case 18: return f.template operator()<18>();
    case 20: return f.template operator()<20>();
    case 24: return f.template operator()<24>();
    case 30: return f.template operator()<30>();
    case 36: return f.template operator()<36>();
  }
  throw Error(ErrorCode::InvalidArgument, "unsupported (order, dim) combination for the energy");
}

}  // namespace

EnergyModel::EnergyModel(const MetricWeights& weights, const EnergyKind& kind, int N, int M)
    : weights_(weights), kind_(kind), N_(N), M_(M), gl_(gauss_legendre(2 * weights.m - 1)),
      basis_(std::make_shared<SpectralBasis>(N, M, weights.m)),
      metric_(std::make_shared<MetricEvaluator>(weights, N, M)) {
  if (kind.is_rat() && weights.m != 2) throw Error(ErrorCode::InvalidArgument, "the rational energy needs m = 2");
  if (weights.m > kMaxOrder) throw Error(ErrorCode::InvalidArgument, "metric order too large");
  if (M <= 2 * N) throw Error(ErrorCode::InsufficientSamples, "need M > 2N quadrature nodes");
}

void EnergyModel::check_inputs(const FourierCurve& hat, const FourierCurve& delta) const {
  require_same_shape(hat, delta, "segment energy");
  if (hat.order() != N_) throw Error(ErrorCode::InvalidArgument, "curve order does not match the energy model");
  if (hat.dim() > kMaxDim) throw Error(ErrorCode::InvalidArgument, "dimension too large");
}

EnergyModel::Jets EnergyModel::jets(const FourierCurve& hat, const FourierCurve& delta) const {
  check_inputs(hat, delta);
  Jets j;
  for (int k = 0; k <= weights_.m; ++k) {
    j.hat.push_back(basis_->E[k] * hat.matrix());
    j.del.push_back(basis_->E[k] * delta.matrix());
  }
  const Eigen::MatrixXd c1 = j.hat[1] + j.del[1];
  if (j.hat[1].rowwise().norm().minCoeff() <= kSpeedFloor || c1.rowwise().norm().minCoeff() <= kSpeedFloor)
    throw Error(ErrorCode::DegenerateCurve, "curve speed below floor");
  return j;
}

namespace {

struct NodeFlags {
  bool infinite = false;
  bool lower_ok = true;
  bool eps_kink = false;
};

template <class T>
T node_value(const EnergyKind& kind, const MetricWeights& w, const QuadratureRule& gl, const T* hat, const T* del,
             int d, NodeFlags& f, bool exact_v = false) {
  if (kind.is_rat()) return detail::rat_integrand(hat, del, d, w.a.data(), exact_v, &f.infinite);
  return detail::reg_integrand(hat, del, d, w.m, w.a.data(), kind.epsilon, gl, &f.lower_ok, &f.eps_kink);
}

void raise_flags(const NodeFlags& f, const EnergyKind& kind) {
  if (!f.lower_ok) throw Error(ErrorCode::NonPositiveLowerBound, "smoothed lower length bound is not positive");
  if (f.eps_kink) warn_eps_kink(kind.epsilon);
}

}  // namespace

EnergyValue EnergyModel::value(const FourierCurve& hat, const FourierCurve& delta) const {
  const Jets J = jets(hat, delta);
  const int d = hat.dim(), m = weights_.m;
  std::array<double, (kMaxOrder + 1) * kMaxDim> h{}, e{};
  double total = 0;
  NodeFlags flags;
  for (int i = 0; i < M_; ++i) {
    for (int j = 0; j <= m; ++j)
      for (int k = 0; k < d; ++k) {
        h[j * d + k] = J.hat[j](i, k);
        e[j * d + k] = J.del[j](i, k);
      }
    total += node_value(kind_, weights_, gl_, h.data(), e.data(), d, flags);
    if (flags.infinite) return EnergyValue::infinite();
    if (!flags.lower_ok) break;
  }
  raise_flags(flags, kind_);
  return EnergyValue(total * 2.0 * M_PI / M_);
}

double EnergyModel::bar_value(const FourierCurve& hat, const FourierCurve& delta) const {
  if (weights_.m != 2) throw Error(ErrorCode::InvalidArgument, "barW needs m = 2");
  const Jets J = jets(hat, delta);
  const int d = hat.dim();
  std::array<double, 3 * kMaxDim> h{}, e{};
  double total = 0;
  NodeFlags flags;
  for (int i = 0; i < M_; ++i) {
    for (int j = 0; j <= 2; ++j)
      for (int k = 0; k < d; ++k) {
        h[j * d + k] = J.hat[j](i, k);
        e[j * d + k] = J.del[j](i, k);
      }
    total += detail::rat_integrand(h.data(), e.data(), d, weights_.a.data(), true, &flags.infinite);
    if (flags.infinite) throw Error(ErrorCode::NonPositiveQ, "q <= 0 at node " + std::to_string(i));
  }
  return total * 2.0 * M_PI / M_;
}

EnergyValue EnergyModel::gradient(const FourierCurve& hat, const FourierCurve& delta, Eigen::VectorXd* d_hat,
                                  Eigen::VectorXd* d_check) const {
  const Jets J = jets(hat, delta);
  const int d = hat.dim(), m = weights_.m;
  const int nj = (m + 1) * d;
  std::vector<Eigen::MatrixXd> gh(m + 1, Eigen::MatrixXd::Zero(M_, d)), gd(m + 1, Eigen::MatrixXd::Zero(M_, d));
  NodeFlags flags;
  double total = 0;
  const bool finite = dispatch(2 * nj, [&]<int N>() {
    using D = ad::Dual<double, N>;
    std::array<D, (kMaxOrder + 1) * kMaxDim> h, e;
    for (int i = 0; i < M_; ++i) {
      for (int j = 0; j <= m; ++j)
        for (int k = 0; k < d; ++k) {
          h[j * d + k] = D::variable(J.hat[j](i, k), j * d + k);
          e[j * d + k] = D::variable(J.del[j](i, k), nj + j * d + k);
        }
      const D val = node_value(kind_, weights_, gl_, h.data(), e.data(), d, flags);
      if (flags.infinite) return false;
      if (!flags.lower_ok) return true;
      total += val.v;
      for (int j = 0; j <= m; ++j)
        for (int k = 0; k < d; ++k) {
          gh[j](i, k) = val.d[j * d + k];
          gd[j](i, k) = val.d[nj + j * d + k];
        }
    }
    return true;
  });
  if (!finite) return EnergyValue::infinite();
  raise_flags(flags, kind_);
  const double w = 2.0 * M_PI / M_;
  // Pull back through the evaluation operators; ∂/∂č = ∂/∂δ, ∂/∂ĉ|č = ∂/∂ĉ|δ − ∂/∂δ.
  RowMatrix Gh = RowMatrix::Zero(2 * N_ + 1, d), Gd = RowMatrix::Zero(2 * N_ + 1, d);
  for (int j = 0; j <= m; ++j) {
    Gh.noalias() += basis_->E[j].transpose() * gh[j];
    Gd.noalias() += basis_->E[j].transpose() * gd[j];
  }
  Gh *= w;
  Gd *= w;
  if (d_check) *d_check = Eigen::Map<const Eigen::VectorXd>(Gd.data(), Gd.size());
  if (d_hat) {
    Gh -= Gd;
    *d_hat = Eigen::Map<const Eigen::VectorXd>(Gh.data(), Gh.size());
  }
  return EnergyValue(total * w);
}

Eigen::MatrixXd EnergyModel::hessian_at_diagonal(const FourierCurve& c) const {
  const FourierCurve zero(c.dim(), c.order());
  const Jets J = jets(c, zero);
  const int d = c.dim(), m = weights_.m;
  const int nj = (m + 1) * d;
  // Per-node Hessian in the δ-jet variables, then assembly.
  std::vector<Eigen::MatrixXd> H(M_, Eigen::MatrixXd::Zero(nj, nj));
  NodeFlags flags;
  dispatch(nj, [&]<int N>() {
    using D1 = ad::Dual<double, N>;
    using D2 = ad::Dual<D1, N>;
    std::array<D2, (kMaxOrder + 1) * kMaxDim> h, e;
    for (int i = 0; i < M_; ++i) {
      for (int j = 0; j <= m; ++j)
        for (int k = 0; k < d; ++k) {
          h[j * d + k] = D2(J.hat[j](i, k));
          D2 x(D1::variable(0.0, j * d + k));
          x.d[j * d + k] = D1(1.0);
          e[j * d + k] = x;
        }
      const D2 val = node_value(kind_, weights_, gl_, h.data(), e.data(), d, flags);
      if (flags.infinite || !flags.lower_ok) return 0;
      for (int a = 0; a < nj; ++a)
        for (int b = 0; b < nj; ++b) H[i](a, b) = val.d[a].d[b];
    }
    return 0;
  });
  if (flags.infinite) throw Error(ErrorCode::NonPositiveQ, "q <= 0 at the diagonal");
  raise_flags(flags, kind_);
  const int nb = 2 * N_ + 1;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(nb * d, nb * d);
  Eigen::MatrixXd tmp(M_, nb);
  for (int ja = 0; ja <= m; ++ja)
    for (int ka = 0; ka < d; ++ka)
      for (int jb = 0; jb <= m; ++jb)
        for (int kb = 0; kb < d; ++kb) {
          Eigen::VectorXd h(M_);
          for (int i = 0; i < M_; ++i) h(i) = H[i](ja * d + ka, jb * d + kb);
          if (h.cwiseAbs().maxCoeff() == 0) continue;
          tmp = h.asDiagonal() * basis_->E[jb];
          const Eigen::MatrixXd blk = basis_->E[ja].transpose() * tmp;
          for (int p = 0; p < nb; ++p)
            for (int q = 0; q < nb; ++q) out(p * d + ka, q * d + kb) += blk(p, q);
        }
  out *= 2.0 * M_PI / M_;
  return 0.5 * (out + out.transpose());
}

double EnergyModel::hessian_bilinear(const FourierCurve& c, const FourierCurve& u, const FourierCurve& w) const {
  require_same_shape(c, u, "hessian_bilinear");
  require_same_shape(c, w, "hessian_bilinear");
  const FourierCurve zero(c.dim(), c.order());
  const Jets J = jets(c, zero);
  const int d = c.dim(), m = weights_.m;
  std::vector<Eigen::MatrixXd> ju, jw;
  for (int k = 0; k <= m; ++k) {
    ju.push_back(basis_->E[k] * u.matrix());
    jw.push_back(basis_->E[k] * w.matrix());
  }
  using D1 = ad::Dual<double, 1>;
  using D2 = ad::Dual<D1, 1>;
  std::array<D2, (kMaxOrder + 1) * kMaxDim> h, e;
  NodeFlags flags;
  double total = 0;
  for (int i = 0; i < M_; ++i) {
    for (int j = 0; j <= m; ++j)
      for (int k = 0; k < d; ++k) {
        h[j * d + k] = D2(J.hat[j](i, k));
        // δ = α u + β w, differentiate in α (outer) and β (inner).
        D2 x;
        x.v = D1(0.0);
        x.v.d[0] = jw[j](i, k);
        x.d[0] = D1(ju[j](i, k));
        e[j * d + k] = x;
      }
    const D2 val = node_value(kind_, weights_, gl_, h.data(), e.data(), d, flags);
    if (flags.infinite) throw Error(ErrorCode::NonPositiveQ, "q <= 0 at the diagonal");
    total += val.d[0].d[0];
  }
  raise_flags(flags, kind_);
  return total * 2.0 * M_PI / M_;
}

// ---------------------------------------------------------------------------

double w_reg(const FourierCurve& c_hat, const FourierCurve& c_check, const MetricWeights& weights, double eps,
             int M) {
  const EnergyModel model(weights, EnergyKind::reg(eps), c_hat.order(), M);
  return model.value(c_hat, c_check - c_hat).value();
}

EnergyValue w_rat(const FourierCurve& c_hat, const FourierCurve& c_check, const MetricWeights& weights, int M) {
  const EnergyModel model(weights, EnergyKind::rat(), c_hat.order(), M);
  return model.value(c_hat, c_check - c_hat);
}

double barW_oracle(const FourierCurve& c_hat, const FourierCurve& c_check, const MetricWeights& weights, int M) {
  const EnergyModel model(weights, EnergyKind::rat(), c_hat.order(), M);
  return model.bar_value(c_hat, c_check - c_hat);
}

EnergyGradient w_grad(const FourierCurve& c_hat, const FourierCurve& c_check, const MetricWeights& weights,
                      const EnergyKind& kind, int M) {
  const EnergyModel model(weights, kind, c_hat.order(), M);
  Eigen::VectorXd gh, gc;
  EnergyGradient g;
  g.value = model.gradient(c_hat, c_check - c_hat, &gh, &gc);
  if (!g.value.is_finite()) throw Error(ErrorCode::InfiniteEnergy, "gradient requested at infinite energy");
  g.d_hat = FourierCurve(c_hat.dim(), c_hat.order(), gh);
  g.d_check = FourierCurve(c_hat.dim(), c_hat.order(), gc);
  return g;
}

Eigen::MatrixXd hessian_at_diagonal(const FourierCurve& c, const MetricWeights& weights, const EnergyKind& kind,
                                    int M) {
  return EnergyModel(weights, kind, c.order(), M).hessian_at_diagonal(c);
}

}  // namespace sobcurve
