#pragma once

#include <Eigen/Dense>
#include <limits>
#include <memory>
#include <vector>

#include "sobcurve/curve.hpp"
#include "sobcurve/metric.hpp"
#include "sobcurve/quadrature.hpp"
#include "sobcurve/spectral.hpp"

namespace sobcurve {

struct EnergyKind {
  enum class Type { Reg, Rat };
  Type type = Type::Rat;
  double epsilon = 0;

  static EnergyKind reg(double eps);
  static EnergyKind rat() { return {}; }
  bool is_rat() const { return type == Type::Rat; }
};

// Energy value with an explicit +∞ state (W_rat when q ≤ 0 somewhere).
class EnergyValue {
 public:
  EnergyValue() = default;
  explicit EnergyValue(double v) : value_(v) {}
  static EnergyValue infinite() {
    EnergyValue e;
    e.finite_ = false;
    return e;
  }
  bool is_finite() const { return finite_; }
  double value() const;  // throws InfiniteEnergy when infinite
  double value_or_inf() const { return finite_ ? value_ : std::numeric_limits<double>::infinity(); }

  EnergyValue& operator+=(const EnergyValue& o) {
    finite_ = finite_ && o.finite_;
    value_ += o.value_;
    return *this;
  }

 private:
  double value_ = 0;
  bool finite_ = true;
};

struct SmoothMaxMin {
  double max, min, min_clamped;
};
SmoothMaxMin smooth_max_min(double alpha, double beta, double eps);

struct LengthBounds {
  Eigen::VectorXd upper, lower;
};
LengthBounds length_bounds(const SampledJet& hat, const SampledJet& check, double eps);

// Per-node abbreviations of the rational energy. tau is the cross term
// (ĉ'·č'' + č'·ĉ'')/2; v = q/(rp); V = φ cot φ with v = cos φ.
struct RationalCoefficients {
  double r, p, q, rho, sigma, tau;
  double u, v, V;
  Eigen::Vector2d Phi1, Phi2, Theta1;
  Eigen::Vector3d Theta2;
  Eigen::Matrix2d Xi1;
  Eigen::Matrix<double, 2, 3> Xi2;
};
std::vector<RationalCoefficients> rational_coefficients(const SampledJet& hat, const SampledJet& check);

// Exact t-integrals of L, L/D, L/D², L·Q/D³, L·Q²/D⁴ over [0,1], where
// L = (1−t)r + tp, D = |(1−t)ĉ' + tč'|², Q = ρ(1−t)² + σt² + 2τt(1−t).
struct TimeIntegrals {
  double w0, w1, w2a, w2b, w2c;
};
TimeIntegrals closed_form_time_integrals(double r, double p, double q, double rho, double sigma, double tau);
TimeIntegrals quadrature_time_integrals(double r, double p, double q, double rho, double sigma, double tau,
                                        int nodes = 64);

// Evaluates one kind of energy on a fixed (N, M) discretization. Segment
// energies are taken in (base, displacement) form so that differences of
// nearby curves keep their relative precision.
class EnergyModel {
 public:
  EnergyModel(const MetricWeights& weights, const EnergyKind& kind, int N, int M);

  const MetricWeights& weights() const { return weights_; }
  const EnergyKind& kind() const { return kind_; }
  int N() const { return N_; }
  int M() const { return M_; }
  const MetricEvaluator& metric() const { return *metric_; }
  const SpectralBasis& basis() const { return *basis_; }

  // W[hat, hat + delta].
  EnergyValue value(const FourierCurve& hat, const FourierCurve& delta) const;
  // Gradients of W[ĉ, č] with respect to ĉ (č fixed) and č (ĉ fixed).
  // Either output may be null.
  EnergyValue gradient(const FourierCurve& hat, const FourierCurve& delta, Eigen::VectorXd* d_hat,
                       Eigen::VectorXd* d_check) const;
  // ∂_2² W[c, c] over the Fourier basis.
  Eigen::MatrixXd hessian_at_diagonal(const FourierCurve& c) const;
  // ∂_2² W[c, c](u, w).
  double hessian_bilinear(const FourierCurve& c, const FourierCurve& u, const FourierCurve& w) const;

  // Oracle variant for the rational energy with exact V (m = 2).
  double bar_value(const FourierCurve& hat, const FourierCurve& delta) const;

 private:
  struct Jets {
    std::vector<Eigen::MatrixXd> hat, del;
  };
  Jets jets(const FourierCurve& hat, const FourierCurve& delta) const;
  void check_inputs(const FourierCurve& hat, const FourierCurve& delta) const;

  MetricWeights weights_;
  EnergyKind kind_;
  int N_, M_;
  QuadratureRule gl_;
  std::shared_ptr<const SpectralBasis> basis_;
  std::shared_ptr<const MetricEvaluator> metric_;
};

double w_reg(const FourierCurve& c_hat, const FourierCurve& c_check, const MetricWeights& weights, double eps,
             int M);
EnergyValue w_rat(const FourierCurve& c_hat, const FourierCurve& c_check, const MetricWeights& weights, int M);
double barW_oracle(const FourierCurve& c_hat, const FourierCurve& c_check, const MetricWeights& weights, int M);

struct EnergyGradient {
  EnergyValue value;
  FourierCurve d_hat, d_check;
};
EnergyGradient w_grad(const FourierCurve& c_hat, const FourierCurve& c_check, const MetricWeights& weights,
                      const EnergyKind& kind, int M);
Eigen::MatrixXd hessian_at_diagonal(const FourierCurve& c, const MetricWeights& weights, const EnergyKind& kind,
                                    int M);

}  // namespace sobcurve
