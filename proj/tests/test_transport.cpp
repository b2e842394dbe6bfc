#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "sobcurve/metric.hpp"
#include "sobcurve/oracle.hpp"
#include "sobcurve/transport.hpp"

using namespace sobcurve;
using testing::error_of;
using testing::perturbed_circle;
using testing::random_field;

namespace {

const MetricWeights kWeights({1e-4, 1, 1e-2});

FourierCurve mode1(int N, double xc, double xs, double yc, double ys) {
  FourierCurve f(2, N);
  f.set_cos(1, Eigen::Vector2d(xc, yc));
  f.set_sin(1, Eigen::Vector2d(xs, ys));
  return f;
}

}  // namespace

TEST_CASE("Schild rung degenerate cases and round trip") {
  std::mt19937 rng(3);
  const int N = 6, M = 32;
  const FourierCurve c = perturbed_circle(N, rng, 0.3);
  const FourierCurve v = random_field(N, rng), w = random_field(N, rng);
  const FourierCurve zero(2, N);
  for (const EnergyKind& kind : {EnergyKind::rat(), EnergyKind::reg(0.01)}) {
    const EnergyModel model(kWeights, kind, N, M);
    for (double tau : {0.1, 0.025}) {
      CHECK(sobolev_norm(schild_step(c, v, zero, tau, model), 2) < 1e-12);
      CHECK(sobolev_norm(schild_step(c, zero, w, tau, model) - w, 2) < 1e-12);
      CHECK(sobolev_norm(inverse_transport(c, v, tau, zero, model), 2) < 1e-12);
      CHECK(sobolev_norm(inverse_transport(c, zero, tau, w, model) - w, 2) < 1e-12);
      const FourierCurve moved = schild_step(c, v, w, tau, model);
      CHECK(sobolev_norm(moved - w, 2) > 0.1 * tau * sobolev_norm(w, 2));
      const FourierCurve back = inverse_transport(c, v, tau, moved, model);
      CHECK(sobolev_norm(back - w, 2) <= tau * tau * sobolev_norm(w, 2));
    }
  }
}

TEST_CASE("the parallelogram midpoint does not depend on the orientation") {
  std::mt19937 rng(5);
  const int N = 6, M = 32;
  const double tau = 0.05;
  const EnergyModel model(kWeights, EnergyKind::rat(), N, M);
  const FourierCurve c = perturbed_circle(N, rng, 0.3);
  const FourierCurve v = random_field(N, rng), w = random_field(N, rng);
  const FourierCurve a = c + tau * w, b = c + tau * v;
  const FourierCurve s1 = a + el_midpoint(model, a, b - a, {});
  const FourierCurve s2 = b + el_midpoint(model, b, a - b, {});
  CHECK(sobolev_norm(s1 - s2, 2) < 1e-12);
}

TEST_CASE("transport along paths") {
  std::mt19937 rng(7);
  const int N = 6, M = 32;
  const EnergyModel model(kWeights, EnergyKind::rat(), N, M);
  const FourierCurve c = perturbed_circle(N, rng, 0.3);
  const FourierCurve w = random_field(N, rng);

  const DiscretePath still = linear_path(c, c, 6);
  CHECK(sobolev_norm(transport_path(still, w, model) - w, 2) < 1e-12);
  CHECK(sobolev_norm(transport_path(still, FourierCurve(2, N), model), 2) == 0.0);

  // Along a discrete geodesic the transported field keeps its length and its
  // inner product with the velocity up to O(τ).
  SolverOptions opts;
  opts.grad_tol = 1e-11;
  const FourierCurve b = perturbed_circle(N, rng, 0.3);
  const int K = 16;
  const DiscretePath geo = solve_bvp(c, b, K, model, opts);
  const std::vector<FourierCurve> ws = transport_path_all(geo, w, model, opts);
  CHECK(ws.size() == static_cast<size_t>(K + 1));
  CHECK(sobolev_norm(ws.back() - transport_path(geo, w, model, opts), 2) == 0.0);
  const double n0 = std::sqrt(metric_eval(geo[0], ws[0], ws[0], kWeights, M));
  const double nK = std::sqrt(metric_eval(geo[K], ws[K], ws[K], kWeights, M));
  CHECK(std::abs(nK - n0) < 0.05 * n0);
  const std::vector<double> alpha = transport_inner_products(geo, ws, model);
  CHECK(alpha.size() == static_cast<size_t>(K));
  const double a0 = std::abs(alpha.front()) + n0;
  for (int k = 0; k + 1 < K; ++k) CHECK(std::abs(alpha[k + 1] - alpha[k]) < 0.05 * a0);
}

TEST_CASE("covariant derivative of a constant field converges to the Christoffel operator") {
  const int N = 8, M = 40;
  const FourierCurve c = circle_curve(N);
  const FourierCurve v = mode1(N, -0.5, 0, 0, 1), w = mode1(N, 1, 0, 0, 0.5);
  const FourierCurve exact =
      christoffel_circle(TrigPolynomial::from_curve(w), TrigPolynomial::from_curve(v), kWeights).to_curve(N);
  const TangentField field = [&](const FourierCurve&) { return w; };
  const TangentField none = [&](const FourierCurve&) { return FourierCurve(2, N); };
  const EnergyModel model(kWeights, EnergyKind::rat(), N, M);

  CHECK(sobolev_norm(cov_deriv(c, v, none, 0.1, model), 2) < 1e-12);
  CHECK(sobolev_norm(cov_deriv(c, v, none, 0.1, model, {}, true), 2) < 1e-12);

  std::vector<double> one, two;
  for (int K : {16, 32, 64}) {
    one.push_back(sobolev_norm(cov_deriv(c, v, field, 1.0 / K, model) - exact, 2));
    two.push_back(sobolev_norm(cov_deriv(c, v, field, 1.0 / K, model, {}, true) - exact, 2));
  }
  for (int i = 0; i < 2; ++i) {
    CHECK(one[i] / one[i + 1] == doctest::Approx(2.0).epsilon(0.2));
    CHECK(two[i] / two[i + 1] == doctest::Approx(4.0).epsilon(0.2));
  }
  CHECK(two.back() < 1e-3 * sobolev_norm(exact, 2));
}

TEST_CASE("curvature schedules") {
  const CurvatureSchedule a = CurvatureSchedule::one_sided(0.1);
  CHECK(a.beta == 2.0);
  CHECK(a.eps_out == doctest::Approx(0.1));
  CHECK(a.eps_in == doctest::Approx(0.01));
  CHECK_FALSE(a.centered);
  const CurvatureSchedule b = CurvatureSchedule::central(0.1, 2.0);
  CHECK(b.beta == 1.5);
  CHECK(b.eps_out == doctest::Approx(0.005));
  CHECK(b.eps_in == doctest::Approx(0.0005));
  CHECK(b.centered);
}

TEST_CASE("discrete Riemann tensor and sectional curvature") {
  const int N = 8, M = 40;
  const MetricWeights unit = MetricWeights::unit(2);
  const EnergyModel model(unit, EnergyKind::rat(), N, M);
  const FourierCurve c = circle_curve(N);
  const FourierCurve v = mode1(N, 1, 0, 0, 0), w = mode1(N, 0, 0, 1, 0);
  const double tau = 1.0 / 16;
  const CurvatureSchedule s = CurvatureSchedule::central(tau);

  CHECK(sobolev_norm(riemann_tensor(c, v, v, w, tau, s, model), 2) == 0.0);
  CHECK(sobolev_norm(riemann_tensor(c, v, w, FourierCurve(2, N), tau, s, model), 2) < 1e-12);
  const FourierCurve r1 = riemann_tensor(c, v, w, w, tau, s, model);
  const FourierCurve r2 = riemann_tensor(c, w, v, w, tau, s, model);
  CHECK(sobolev_norm(r1 + r2, 2) == 0.0);

  const double exact = -31 / (117 * M_PI);
  const double k_vw = sectional_curvature(c, v, w, tau, s, model);
  const double k_wv = sectional_curvature(c, w, v, tau, s, model);
  CHECK(std::abs(k_vw - exact) < 5e-3);
  CHECK(std::abs(k_wv - exact) < 5e-3);
  const double tau2 = tau / 2;
  const double k_half = sectional_curvature(c, v, w, tau2, CurvatureSchedule::central(tau2), model);
  CHECK(std::abs(k_half - exact) < 0.35 * std::abs(k_vw - exact));

  const double one_sided = sectional_curvature(c, v, w, tau, CurvatureSchedule::one_sided(tau), model);
  CHECK(std::abs(one_sided - exact) < 0.1);

  CHECK(error_of([&] { sectional_curvature(c, v, v, tau, s, model); }) == ErrorCode::DegeneratePlane);
  CHECK(error_of([&] { sectional_curvature(c, v, 3.0 * v, tau, s, model); }) == ErrorCode::DegeneratePlane);
}

TEST_CASE("regularized curvature uses the schedule's epsilon") {
  const int N = 8, M = 40;
  const MetricWeights unit = MetricWeights::unit(2);
  const FourierCurve c = circle_curve(N);
  const FourierCurve v = mode1(N, 1, 0, 0, 0), w = mode1(N, 0, 0, 1, 0);
  const double tau = 1.0 / 16;
  const CurvatureSchedule s = CurvatureSchedule::central(tau);
  // The model's own ε is ignored, so two different placeholders agree.
  const double a = sectional_curvature(c, v, w, tau, s, EnergyModel(unit, EnergyKind::reg(0.3), N, M));
  const double b = sectional_curvature(c, v, w, tau, s, EnergyModel(unit, EnergyKind::reg(1e-3), N, M));
  CHECK(a == b);
  CHECK(std::abs(a - (-31 / (117 * M_PI))) < 0.02);
}
