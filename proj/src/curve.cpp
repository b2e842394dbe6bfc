#include "sobcurve/curve.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "sobcurve/errors.hpp"
#include "sobcurve/spectral.hpp"

namespace sobcurve {

FourierCurve::FourierCurve(int dim, int order)
    : dim_(dim), order_(order), coeffs_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(2 * order + 1) * dim)) {
  if (dim < 1 || order < 0) throw Error(ErrorCode::InvalidArgument, "curve needs dim >= 1 and order >= 0");
}

FourierCurve::FourierCurve(int dim, int order, Eigen::VectorXd coeffs)
    : dim_(dim), order_(order), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != static_cast<Eigen::Index>(2 * order + 1) * dim)
    throw Error(ErrorCode::InvalidArgument, "coefficient vector has wrong length");
}

Eigen::VectorXd FourierCurve::cos_coeff(int j) const {
  return matrix().row(j == 0 ? 0 : 2 * j - 1).transpose();
}

Eigen::VectorXd FourierCurve::sin_coeff(int j) const {
  if (j == 0) return Eigen::VectorXd::Zero(dim_);
  return matrix().row(2 * j).transpose();
}

void FourierCurve::set_cos(int j, const Eigen::VectorXd& a) {
  matrix().row(j == 0 ? 0 : 2 * j - 1) = a.transpose();
}

void FourierCurve::set_sin(int j, const Eigen::VectorXd& b) {
  if (j == 0) throw Error(ErrorCode::InvalidArgument, "b_0 does not exist");
  matrix().row(2 * j) = b.transpose();
}

Eigen::VectorXd FourierCurve::eval(double theta, int deriv) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(dim_);
  if (deriv == 0) out = cos_coeff(0);
  const double shift = deriv * M_PI / 2;
  for (int j = 1; j <= order_; ++j) {
    const double scale = std::pow(static_cast<double>(j), deriv);
    out += scale * (std::cos(j * theta + shift) * cos_coeff(j) + std::sin(j * theta + shift) * sin_coeff(j));
  }
  return out;
}

FourierCurve& FourierCurve::operator+=(const FourierCurve& o) {
  require_same_shape(*this, o, "curve addition");
  coeffs_ += o.coeffs_;
  return *this;
}

FourierCurve& FourierCurve::operator-=(const FourierCurve& o) {
  require_same_shape(*this, o, "curve subtraction");
  coeffs_ -= o.coeffs_;
  return *this;
}

FourierCurve& FourierCurve::operator*=(double s) {
  coeffs_ *= s;
  return *this;
}

FourierCurve operator+(FourierCurve a, const FourierCurve& b) { return a += b; }
FourierCurve operator-(FourierCurve a, const FourierCurve& b) { return a -= b; }
FourierCurve operator*(double s, FourierCurve a) { return a *= s; }
FourierCurve operator*(FourierCurve a, double s) { return a *= s; }
FourierCurve operator-(FourierCurve a) { return a *= -1.0; }

void require_same_shape(const FourierCurve& a, const FourierCurve& b, const char* what) {
  if (a.dim() != b.dim() || a.order() != b.order()) {
    std::ostringstream os;
    os << what << ": shape mismatch (dim " << a.dim() << "/" << b.dim() << ", order " << a.order() << "/"
       << b.order() << ")";
    throw Error(ErrorCode::InvalidArgument, os.str());
  }
}

SampledJet sample_jet(const FourierCurve& curve, int M, int m) {
  if (M < 1 || m < 0) throw Error(ErrorCode::InvalidArgument, "sample_jet needs M >= 1, m >= 0");
  SampledJet jet;
  jet.num_nodes = M;
  jet.max_order = m;
  jet.dim = curve.dim();
  const auto C = curve.matrix();
  for (int j = 0; j <= m; ++j) jet.orders.push_back(evaluation_matrix(curve.order(), M, j) * C);
  return jet;
}

FourierCurve truncate(const FourierCurve& curve, int order) {
  if (order < 0) throw Error(ErrorCode::InvalidArgument, "truncation order must be >= 0");
  if (order >= curve.order()) return curve;
  FourierCurve out(curve.dim(), order);
  out.matrix() = curve.matrix().topRows(out.rows());
  return out;
}

FourierCurve pad(const FourierCurve& curve, int order) {
  if (order <= curve.order()) return truncate(curve, order);
  FourierCurve out(curve.dim(), order);
  out.matrix().topRows(curve.rows()) = curve.matrix();
  return out;
}

FourierCurve project_samples(const Eigen::MatrixXd& samples, int N) {
  const int M = static_cast<int>(samples.rows());
  if (M <= 2 * N) throw Error(ErrorCode::InsufficientSamples, "need M > 2N samples");
  // Orthogonality of the sampled basis for resolved modes: E0ᵀE0 = diag(M, M/2, ...).
  const Eigen::MatrixXd E0 = evaluation_matrix(N, M, 0);
  Eigen::MatrixXd C = E0.transpose() * samples;
  C.row(0) /= M;
  C.bottomRows(2 * N) *= 2.0 / M;
  FourierCurve out(static_cast<int>(samples.cols()), N);
  out.matrix() = C;
  return out;
}

double min_speed(const FourierCurve& curve, int M) {
  const Eigen::MatrixXd d1 = evaluation_matrix(curve.order(), M, 1) * curve.matrix();
  return d1.rowwise().norm().minCoeff();
}

double sobolev_norm(const FourierCurve& u, int r) {
  const auto C = u.matrix();
  double s = 2.0 * C.row(0).squaredNorm();
  for (int j = 1; j <= u.order(); ++j) {
    const double w = r == 0 ? 1.0 : 1.0 + std::pow(static_cast<double>(j), 2 * r);
    s += w * (C.row(2 * j - 1).squaredNorm() + C.row(2 * j).squaredNorm());
  }
  return std::sqrt(M_PI * s);
}

std::string curve_to_json(const FourierCurve& c) {
  nlohmann::json j;
  j["dim"] = c.dim();
  j["order"] = c.order();
  auto vec = [](const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  nlohmann::json cs = nlohmann::json::array(), ss = nlohmann::json::array();
  for (int k = 0; k <= c.order(); ++k) cs.push_back(vec(c.cos_coeff(k)));
  for (int k = 1; k <= c.order(); ++k) ss.push_back(vec(c.sin_coeff(k)));
  j["cos"] = cs;
  j["sin"] = ss;
  return j.dump(1);
}

FourierCurve curve_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw Error(ErrorCode::Io, std::string("curve file is not valid JSON: ") + e.what());
  }
  try {
    const int d = j.at("dim").get<int>();
    const int N = j.at("order").get<int>();
    const auto& cs = j.at("cos");
    const auto& ss = j.at("sin");
    if (d < 1 || N < 0) throw Error(ErrorCode::Io, "dim must be >= 1 and order >= 0");
    if (cs.size() != static_cast<size_t>(N + 1) || ss.size() != static_cast<size_t>(N))
      throw Error(ErrorCode::Io, "cos/sin array lengths do not match order");
    FourierCurve c(d, N);
    auto read = [d](const nlohmann::json& row) {
      auto v = row.get<std::vector<double>>();
      if (v.size() != static_cast<size_t>(d)) throw Error(ErrorCode::Io, "coefficient vector length != dim");
      return Eigen::VectorXd(Eigen::Map<Eigen::VectorXd>(v.data(), d));
    };
    for (int k = 0; k <= N; ++k) c.set_cos(k, read(cs[k]));
    for (int k = 1; k <= N; ++k) c.set_sin(k, read(ss[k - 1]));
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Io, std::string("malformed curve file: ") + e.what());
  }
}

FourierCurve read_curve(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return curve_from_json(ss.str());
}

void write_curve(const std::string& path, const FourierCurve& c) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  out << curve_to_json(c) << "\n";
}

}  // namespace sobcurve
