#include "sobcurve/shapes.hpp"

#include "sobcurve/errors.hpp"

namespace sobcurve {

namespace {

void need_order(int N, int k, const char* what) {
  if (N < k) throw Error(ErrorCode::InvalidArgument, std::string(what) + " needs order >= " + std::to_string(k));
}

}  // namespace

FourierCurve circle_curve(int N, double radius) { return ellipse_curve(N, radius, radius); }

FourierCurve ellipse_curve(int N, double a, double b) {
  need_order(N, 1, "ellipse");
  FourierCurve c(2, N);
  c.matrix()(1, 0) = a;
  c.matrix()(2, 1) = b;
  return c;
}

FourierCurve star_curve(int N, double amp, int lobes) {
  if (lobes < 2) throw Error(ErrorCode::InvalidArgument, "star needs at least two lobes");
  need_order(N, lobes + 1, "star");
  FourierCurve c = circle_curve(N);
  auto M = c.matrix();
  const int hi = lobes + 1, lo = lobes - 1;
  // r cos θ and r sin θ by product-to-sum.
  M(2 * hi - 1, 0) += 0.5 * amp;
  M(2 * lo - 1, 0) += 0.5 * amp;
  M(2 * hi, 1) += 0.5 * amp;
  M(2 * lo, 1) -= 0.5 * amp;
  return c;
}

FourierCurve named_shape(const std::string& name, int N) {
  if (name == "circle") return circle_curve(N);
  if (name == "ellipse") return ellipse_curve(N, 2.0, 1.0);
  if (name == "star") return star_curve(N);
  throw Error(ErrorCode::InvalidArgument, "unknown shape '" + name + "'");
}

FourierCurve circle_normal_mode(int N, int k) {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "normal mode needs k >= 1");
  need_order(N, k + 1, "normal mode");
  FourierCurve w(2, N);
  auto M = w.matrix();
  // sin kθ cos θ = (sin(k+1)θ + sin(k−1)θ)/2, sin kθ sin θ = (cos(k−1)θ − cos(k+1)θ)/2.
  M(2 * (k + 1), 0) += 0.5;
  if (k > 1) M(2 * (k - 1), 0) += 0.5;
  M(2 * (k + 1) - 1, 1) -= 0.5;
  M(k > 1 ? 2 * (k - 1) - 1 : 0, 1) += 0.5;
  return w;
}

FourierCurve rotated_tangent(const FourierCurve& c) {
  if (c.dim() != 2) throw Error(ErrorCode::InvalidArgument, "rotated_tangent is planar");
  FourierCurve out(2, c.order());
  for (int j = 1; j <= c.order(); ++j) {
    // d/dθ: a cos + b sin → j(b cos − a sin); rotation (x, y) → (−y, x).
    const Eigen::VectorXd a = c.cos_coeff(j), b = c.sin_coeff(j);
    const Eigen::VectorXd da = j * b, db = -j * a;
    out.set_cos(j, Eigen::Vector2d(-da(1), da(0)));
    out.set_sin(j, Eigen::Vector2d(-db(1), db(0)));
  }
  return out;
}

}  // namespace sobcurve
