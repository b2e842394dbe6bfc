#include "sobcurve/transport.hpp"

#include <cmath>

#include "sobcurve/errors.hpp"

namespace sobcurve {

CurvatureSchedule CurvatureSchedule::one_sided(double tau) {
  CurvatureSchedule s;
  s.beta = 2.0;
  s.eps_out = tau;
  s.eps_in = tau * tau;
  s.centered = false;
  return s;
}

CurvatureSchedule CurvatureSchedule::central(double tau, double C) {
  if (!(C > 0)) throw Error(ErrorCode::InvalidArgument, "schedule constant must be positive");
  CurvatureSchedule s;
  s.beta = 1.5;
  s.eps_out = tau * tau / C;
  s.eps_in = tau * tau * tau / C;
  s.centered = true;
  return s;
}

namespace {

void check_tau(double tau) {
  if (!(tau > 0)) throw Error(ErrorCode::InvalidArgument, "step size must be positive");
}

EnergyModel with_epsilon(const EnergyModel& model, double eps) {
  if (model.kind().is_rat()) return model;
  return EnergyModel(model.weights(), EnergyKind::reg(eps), model.N(), model.M());
}

}  // namespace

FourierCurve schild_step(const FourierCurve& c, const FourierCurve& v, const FourierCurve& w, double tau,
                         const EnergyModel& model, const SolverOptions& opts) {
  check_tau(tau);
  require_same_shape(c, v, "schild_step");
  require_same_shape(c, w, "schild_step");
  const FourierCurve tv = tau * v, tw = tau * w;
  // Center s = c + τw + x of the diagonal from c + τw to c + τv.
  const FourierCurve x = el_midpoint(model, c + tw, tv - tw, opts);
  const FourierCurve half = tw + x;  // s − c
  const FourierCurve y = el_forward_step(model, c, c + half, half, opts);
  return (1.0 / tau) * ((half + y) - tv);
}

std::vector<FourierCurve> transport_path_all(const DiscretePath& path, const FourierCurve& w0,
                                             const EnergyModel& model, const SolverOptions& opts) {
  require_same_shape(path[0], w0, "transport_path");
  const int K = path.K();
  const double tau = path.step();
  std::vector<FourierCurve> w{w0};
  for (int k = 0; k < K; ++k) {
    const FourierCurve vk = static_cast<double>(K) * (path[k + 1] - path[k]);
    try {
      w.push_back(schild_step(path[k], vk, w.back(), tau, model, opts));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::NoConvergence)
        throw Error(ErrorCode::NoConvergence, "transport rung " + std::to_string(k) + ": " + e.what());
      throw;
    }
  }
  return w;
}

FourierCurve transport_path(const DiscretePath& path, const FourierCurve& w0, const EnergyModel& model,
                            const SolverOptions& opts) {
  return transport_path_all(path, w0, model, opts).back();
}

std::vector<double> transport_inner_products(const DiscretePath& path, const std::vector<FourierCurve>& w,
                                             const EnergyModel& model) {
  const int K = path.K();
  std::vector<double> alpha(K);
  for (int k = 0; k < K; ++k) {
    const FourierCurve vk = static_cast<double>(K) * (path[k + 1] - path[k]);
    alpha[k] = 0.5 * model.hessian_bilinear(path[k], vk, w[k]);
  }
  return alpha;
}

FourierCurve inverse_transport(const FourierCurve& c, const FourierCurve& v, double tau,
                               const FourierCurve& w_at_end, const EnergyModel& model,
                               const SolverOptions& opts) {
  check_tau(tau);
  require_same_shape(c, v, "inverse_transport");
  require_same_shape(c, w_at_end, "inverse_transport");
  const FourierCurve tv = tau * v;
  // Center of the diagonal from c to c + τv + τw.
  const FourierCurve x = el_midpoint(model, c, tv + tau * w_at_end, opts);
  // Second diagonal from c + τv through the center: z − (c + τv) = h + y.
  const FourierCurve h = x - tv;
  const FourierCurve y = el_forward_step(model, c + tv, c + x, h, opts);
  return (1.0 / tau) * (tv + (h + y));
}

FourierCurve cov_deriv(const FourierCurve& c, const FourierCurve& v, const TangentField& w_field, double tau,
                       const EnergyModel& model, const SolverOptions& opts, bool centered) {
  check_tau(tau);
  const FourierCurve tv = tau * v;
  const FourierCurve plus = inverse_transport(c, v, tau, w_field(c + tv), model, opts);
  if (!centered) return (1.0 / tau) * (plus - w_field(c));
  const FourierCurve minus = inverse_transport(c, -v, tau, -w_field(c - tv), model, opts);
  return (0.5 / tau) * (plus + minus);
}

FourierCurve riemann_tensor(const FourierCurve& c, const FourierCurve& v, const FourierCurve& w,
                            const FourierCurve& z, double tau, const CurvatureSchedule& schedule,
                            const EnergyModel& model, const SolverOptions& opts) {
  check_tau(tau);
  if (!(schedule.beta > 1)) throw Error(ErrorCode::InvalidArgument, "schedule beta must exceed 1");
  const bool reg = !model.kind().is_rat();
  if (reg && !(schedule.eps_out > 0 && schedule.eps_in > 0))
    throw Error(ErrorCode::InvalidArgument, "Reg schedule needs positive eps_out and eps_in");
  const EnergyModel outer = with_epsilon(model, schedule.eps_out);
  const EnergyModel inner = with_epsilon(model, schedule.eps_in);
  const double tau_in = std::pow(tau, schedule.beta);
  const TangentField z_field = [&](const FourierCurve&) { return z; };

  auto nested = [&](const FourierCurve& a, const FourierCurve& b) {
    const TangentField inner_field = [&](const FourierCurve& foot) {
      return cov_deriv(foot, b, z_field, tau_in, inner, opts, schedule.centered);
    };
    return cov_deriv(c, a, inner_field, tau, outer, opts, schedule.centered);
  };
  return nested(v, w) - nested(w, v);
}

double sectional_curvature(const FourierCurve& c, const FourierCurve& v, const FourierCurve& w, double tau,
                           const CurvatureSchedule& schedule, const EnergyModel& model,
                           const SolverOptions& opts) {
  const MetricEvaluator& g = model.metric();
  const double gvv = g.eval(c, v, v), gww = g.eval(c, w, w), gvw = g.eval(c, v, w);
  const double den = gvv * gww - gvw * gvw;
  if (!(den > 1e-12 * gvv * gww)) throw Error(ErrorCode::DegeneratePlane, "v and w do not span a plane");
  const FourierCurve R = riemann_tensor(c, v, w, w, tau, schedule, model, opts);
  return g.eval(c, v, R) / den;
}

}  // namespace sobcurve
