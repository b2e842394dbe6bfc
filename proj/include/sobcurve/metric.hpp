#pragma once

#include <Eigen/Dense>
#include <vector>

#include "sobcurve/curve.hpp"

namespace sobcurve {

inline constexpr double kSpeedFloor = 1e-10;

// Order m and coefficients a_0..a_m (a_0, a_m > 0).
struct MetricWeights {
  MetricWeights() = default;
  explicit MetricWeights(std::vector<double> a_);
  static MetricWeights unit(int m);

  int m = 2;
  std::vector<double> a{1.0, 1.0, 1.0};
};

// ∂_s^j ξ at the grid nodes, j = 0..m, plus the base speed |c'|.
struct ArclengthJet {
  int num_nodes = 0;
  int max_order = 0;
  Eigen::VectorXd speed;
  std::vector<Eigen::MatrixXd> orders;  // M×d each
};

// Caches the grid operators for one (N, M) pair. Cheap to copy-share via const&.
class MetricEvaluator {
 public:
  MetricEvaluator(const MetricWeights& weights, int N, int M);

  const MetricWeights& weights() const { return weights_; }
  int N() const { return N_; }
  int M() const { return M_; }

  Eigen::VectorXd speed(const FourierCurve& base) const;
  ArclengthJet arclength_jet(const FourierCurve& base, const FourierCurve& field, int m) const;
  double eval(const FourierCurve& base, const FourierCurve& xi, const FourierCurve& zeta) const;
  // Gram matrix over the scalar basis (2N+1 functions); the full Gram is this ⊗ I_d.
  Eigen::MatrixXd scalar_gram(const FourierCurve& base) const;

 private:
  MetricWeights weights_;
  int N_, M_;
  Eigen::MatrixXd E0_, E1_, D_;
};

ArclengthJet arclength_jet(const FourierCurve& base, const FourierCurve& field, int M, int m);
double metric_eval(const FourierCurve& base, const FourierCurve& xi, const FourierCurve& zeta,
                   const MetricWeights& weights, int M);
Eigen::MatrixXd gram_matrix(const FourierCurve& base, const MetricWeights& weights, int N, int M);
// Expands a scalar Gram matrix to the interleaved (2N+1)·d coefficient layout.
Eigen::MatrixXd expand_gram(const Eigen::MatrixXd& scalar, int d);
// g-norm of a tangent with a precomputed scalar Gram.
double gram_norm(const Eigen::MatrixXd& scalar_gram, const FourierCurve& v);

double w_lin_oracle(const FourierCurve& c_hat, const FourierCurve& c_check, const MetricWeights& weights, int M,
                    int T = 16);

}  // namespace sobcurve
