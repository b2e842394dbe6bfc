#include "sobcurve/metric.hpp"

#include <cmath>

#include "sobcurve/errors.hpp"
#include "sobcurve/quadrature.hpp"
#include "sobcurve/spectral.hpp"

namespace sobcurve {

MetricWeights::MetricWeights(std::vector<double> a_) : m(static_cast<int>(a_.size()) - 1), a(std::move(a_)) {
  if (m < 2) throw Error(ErrorCode::InvalidArgument, "metric order m must be >= 2");
  if (!(a.front() > 0) || !(a.back() > 0)) throw Error(ErrorCode::InvalidArgument, "a_0 and a_m must be positive");
  for (double x : a)
    if (x < 0) throw Error(ErrorCode::InvalidArgument, "metric weights must be non-negative");
}

MetricWeights MetricWeights::unit(int m) { return MetricWeights(std::vector<double>(m + 1, 1.0)); }

MetricEvaluator::MetricEvaluator(const MetricWeights& weights, int N, int M)
    : weights_(weights), N_(N), M_(M), E0_(evaluation_matrix(N, M, 0)), E1_(evaluation_matrix(N, M, 1)),
      D_(grid_derivative_matrix(M)) {}

Eigen::VectorXd MetricEvaluator::speed(const FourierCurve& base) const {
  if (base.order() != N_) return (evaluation_matrix(base.order(), M_, 1) * base.matrix()).rowwise().norm();
  return (E1_ * base.matrix()).rowwise().norm();
}

namespace {

Eigen::MatrixXd samples(const FourierCurve& c, int N, int M, const Eigen::MatrixXd& E0) {
  if (c.order() == N) return E0 * c.matrix();
  return evaluation_matrix(c.order(), M, 0) * c.matrix();
}

void check_speed(const Eigen::VectorXd& speed) {
  if (speed.minCoeff() <= kSpeedFloor) throw Error(ErrorCode::DegenerateCurve, "base curve speed below floor");
}

}  // namespace

ArclengthJet MetricEvaluator::arclength_jet(const FourierCurve& base, const FourierCurve& field, int m) const {
  if (base.dim() != field.dim()) throw Error(ErrorCode::InvalidArgument, "base and field dims differ");
  ArclengthJet jet;
  jet.num_nodes = M_;
  jet.max_order = m;
  jet.speed = speed(base);
  check_speed(jet.speed);
  const Eigen::VectorXd inv = jet.speed.cwiseInverse();
  jet.orders.push_back(samples(field, N_, M_, E0_));
  for (int j = 1; j <= m; ++j) jet.orders.push_back(inv.asDiagonal() * (D_ * jet.orders.back()));
  return jet;
}

double MetricEvaluator::eval(const FourierCurve& base, const FourierCurve& xi, const FourierCurve& zeta) const {
  const int m = weights_.m;
  const ArclengthJet a = arclength_jet(base, xi, m);
  const ArclengthJet b = arclength_jet(base, zeta, m);
  double total = 0;
  for (int j = 0; j <= m; ++j) {
    if (weights_.a[j] == 0) continue;
    const Eigen::VectorXd dots = a.orders[j].cwiseProduct(b.orders[j]).rowwise().sum();
    total += weights_.a[j] * dots.dot(a.speed);
  }
  return total * 2.0 * M_PI / M_;
}

Eigen::MatrixXd MetricEvaluator::scalar_gram(const FourierCurve& base) const {
  const Eigen::VectorXd sp = speed(base);
  check_speed(sp);
  const Eigen::VectorXd inv = sp.cwiseInverse();
  const Eigen::VectorXd w = sp * (2.0 * M_PI / M_);
  Eigen::MatrixXd J = E0_;
  Eigen::MatrixXd G = weights_.a[0] * (J.transpose() * w.asDiagonal() * J);
  for (int j = 1; j <= weights_.m; ++j) {
    J = inv.asDiagonal() * (D_ * J);
    if (weights_.a[j] != 0) G.noalias() += weights_.a[j] * (J.transpose() * w.asDiagonal() * J);
  }
  return 0.5 * (G + G.transpose());
}

ArclengthJet arclength_jet(const FourierCurve& base, const FourierCurve& field, int M, int m) {
  return MetricEvaluator(MetricWeights::unit(std::max(m, 2)), field.order(), M).arclength_jet(base, field, m);
}

double metric_eval(const FourierCurve& base, const FourierCurve& xi, const FourierCurve& zeta,
                   const MetricWeights& weights, int M) {
  return MetricEvaluator(weights, xi.order(), M).eval(base, xi, zeta);
}

Eigen::MatrixXd expand_gram(const Eigen::MatrixXd& scalar, int d) {
  const Eigen::Index n = scalar.rows();
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n * d, n * d);
  for (Eigen::Index p = 0; p < n; ++p)
    for (Eigen::Index q = 0; q < n; ++q)
      for (int k = 0; k < d; ++k) G(p * d + k, q * d + k) = scalar(p, q);
  return G;
}

Eigen::MatrixXd gram_matrix(const FourierCurve& base, const MetricWeights& weights, int N, int M) {
  return expand_gram(MetricEvaluator(weights, N, M).scalar_gram(base), base.dim());
}

double gram_norm(const Eigen::MatrixXd& scalar_gram, const FourierCurve& v) {
  const auto C = v.matrix();
  return std::sqrt(std::max(0.0, (C.transpose() * scalar_gram * C).trace()));
}

double w_lin_oracle(const FourierCurve& c_hat, const FourierCurve& c_check, const MetricWeights& weights, int M,
                    int T) {
  require_same_shape(c_hat, c_check, "w_lin_oracle");
  const MetricEvaluator ev(weights, c_hat.order(), M);
  const FourierCurve delta = c_check - c_hat;
  const QuadratureRule gl = gauss_legendre(T);
  double total = 0;
  for (int k = 0; k < T; ++k) {
    const double t = gl.nodes[k];
    const FourierCurve c = (1 - t) * c_hat + t * c_check;
    total += gl.weights[k] * ev.eval(c, delta, delta);
  }
  return total;
}

}  // namespace sobcurve
