#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace sobcurve {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Closed curve c(θ) = Σ_{j=0}^N a_j cos(jθ) + b_j sin(jθ) in R^d.
// Coefficients are stored row-major in a (2N+1)×d block: row 0 is a_0,
// row 2j−1 is a_j and row 2j is b_j. Tangent fields use the same type.
class FourierCurve {
 public:
  FourierCurve() = default;
  FourierCurve(int dim, int order);
  FourierCurve(int dim, int order, Eigen::VectorXd coeffs);

  int dim() const { return dim_; }
  int order() const { return order_; }
  int rows() const { return 2 * order_ + 1; }
  Eigen::Index size() const { return coeffs_.size(); }

  const Eigen::VectorXd& coeffs() const { return coeffs_; }
  Eigen::VectorXd& coeffs() { return coeffs_; }

  Eigen::Map<const RowMatrix> matrix() const {
    return Eigen::Map<const RowMatrix>(coeffs_.data(), rows(), dim_);
  }
  Eigen::Map<RowMatrix> matrix() { return Eigen::Map<RowMatrix>(coeffs_.data(), rows(), dim_); }

  Eigen::VectorXd cos_coeff(int j) const;
  Eigen::VectorXd sin_coeff(int j) const;  // j ≥ 1
  void set_cos(int j, const Eigen::VectorXd& a);
  void set_sin(int j, const Eigen::VectorXd& b);

  // k-th θ-derivative at a single angle.
  Eigen::VectorXd eval(double theta, int deriv = 0) const;

  FourierCurve& operator+=(const FourierCurve& o);
  FourierCurve& operator-=(const FourierCurve& o);
  FourierCurve& operator*=(double s);

 private:
  int dim_ = 0;
  int order_ = 0;
  Eigen::VectorXd coeffs_;
};

FourierCurve operator+(FourierCurve a, const FourierCurve& b);
FourierCurve operator-(FourierCurve a, const FourierCurve& b);
FourierCurve operator*(double s, FourierCurve a);
FourierCurve operator*(FourierCurve a, double s);
FourierCurve operator-(FourierCurve a);

// Values and θ-derivatives (orders 0..m) at θ_i = 2πi/M. order(j) is M×d.
struct SampledJet {
  int num_nodes = 0;
  int max_order = 0;
  int dim = 0;
  std::vector<Eigen::MatrixXd> orders;

  const Eigen::MatrixXd& order(int j) const { return orders[j]; }
  Eigen::VectorXd value(int i, int j) const { return orders[j].row(i).transpose(); }
};

SampledJet sample_jet(const FourierCurve& curve, int M, int m);
FourierCurve truncate(const FourierCurve& curve, int order);
// Same curve with more (zero) modes.
FourierCurve pad(const FourierCurve& curve, int order);
// Trigonometric interpolant of M point samples (M×d), first N modes.
FourierCurve project_samples(const Eigen::MatrixXd& samples, int N);
double min_speed(const FourierCurve& curve, int M);

// (∫|u|² + |∂^r u|² dθ)^{1/2} for r ≥ 1 and the L² norm for r = 0, exact from the coefficients.
double sobolev_norm(const FourierCurve& u, int r);

// Every FourierCurve must agree in dim and order.
void require_same_shape(const FourierCurve& a, const FourierCurve& b, const char* what);

std::string curve_to_json(const FourierCurve& c);
FourierCurve curve_from_json(const std::string& text);
FourierCurve read_curve(const std::string& path);
void write_curve(const std::string& path, const FourierCurve& c);

}  // namespace sobcurve
