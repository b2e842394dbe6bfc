#include "sobcurve/geodesic.hpp"

#include <cmath>
#include <deque>
#include <limits>

#include "sobcurve/errors.hpp"
#include "sobcurve/parallel.hpp"

namespace sobcurve {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

FourierCurve as_curve(const FourierCurve& like, const VectorXd& v) { return FourierCurve(like.dim(), like.order(), v); }

RowMatrix as_rows(const VectorXd& v, int rows, int d) { return Eigen::Map<const RowMatrix>(v.data(), rows, d); }

VectorXd as_vec(const RowMatrix& m) { return Eigen::Map<const VectorXd>(m.data(), m.size()); }

// Solves (G ⊗ I_d) x = r for a scalar Gram factorization.
VectorXd gram_solve(const Eigen::LLT<MatrixXd>& llt, const VectorXd& r, int rows, int d) {
  return as_vec(llt.solve(as_rows(r, rows, d)));
}

double gram_norm_vec(const MatrixXd& G, const VectorXd& v, int rows, int d) {
  const RowMatrix V = as_rows(v, rows, d);
  const double t = (V.transpose() * G * V).trace();
  return std::sqrt(t < 0 ? 0.0 : t);  // keeps NaN
}

void check_path(const DiscretePath& path) {
  if (path.K() < 1) throw Error(ErrorCode::InvalidArgument, "a discrete path needs K >= 1");
  for (const auto& c : path.curves) require_same_shape(path.curves.front(), c, "discrete path");
}

bool is_solver_failure(const Error& e) {
  switch (e.code()) {
    case ErrorCode::DegenerateCurve:
    case ErrorCode::NonPositiveLowerBound:
    case ErrorCode::NonPositiveQ:
    case ErrorCode::InfiniteEnergy:
      return true;
    default:
      return false;
  }
}

// Root of a residual F with Jacobian ≈ alpha·(G ⊗ I). Preconditioned fixed
// point first, finite-difference Newton if that fails to contract.
template <class Residual>
VectorXd solve_el(const Residual& F, VectorXd u, const MatrixXd& G, double alpha, int rows, int d,
                  const SolverOptions& opts, const char* what) {
  const Eigen::LLT<MatrixXd> llt(G);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::DegenerateCurve, "Gram matrix not positive definite");
  const VectorXd u0 = u;
  auto scale_of = [&](const VectorXd& x) { return std::max(gram_norm_vec(G, x, rows, d), 1e-300); };

  bool converged = false;
  try {
    double prev = std::numeric_limits<double>::infinity();
    double first = std::numeric_limits<double>::infinity();
    int extra = 0;
    for (int it = 0; it < opts.fixed_point_max_iters; ++it) {
      VectorXd r;
      if (!F(u, r)) break;
      const VectorXd delta = gram_solve(llt, r, rows, d) / alpha;
      const double dn = gram_norm_vec(G, delta, rows, d);
      if (!std::isfinite(dn)) break;
      if (converged) {
        // Polish toward round-off while the update keeps shrinking.
        if (dn > 0.5 * prev || ++extra > 8) break;
      }
      u -= delta;
      if (dn == 0) {
        converged = true;
        break;
      }
      if (!converged && dn <= opts.fixed_point_tol * scale_of(u)) converged = true;
      if (!converged && ((it >= 3 && dn > 2 * prev) || dn > 1e3 * first)) break;
      if (it == 0) first = dn;
      prev = dn;
    }
  } catch (const Error& e) {
    if (!is_solver_failure(e)) throw;
    converged = false;
  }
  if (converged && u.allFinite()) return u;
  if (!opts.newton_fallback)
    throw Error(ErrorCode::NoConvergence, std::string(what) + ": fixed-point iteration did not converge");

  // Newton with a forward-difference Jacobian from the initial guess.
  u = u0;
  const Eigen::Index n = u.size();
  try {
    for (int it = 0; it < opts.fixed_point_max_iters; ++it) {
      VectorXd r;
      if (!F(u, r)) break;
      MatrixXd J(n, n);
      for (Eigen::Index i = 0; i < n; ++i) {
        VectorXd up = u;
        const double h = opts.newton_fd_step;
        up(i) += h;
        VectorXd rp;
        if (!F(up, rp)) throw Error(ErrorCode::NoConvergence, "Jacobian probe left the energy domain");
        J.col(i) = (rp - r) / h;
      }
      const VectorXd delta = J.partialPivLu().solve(r);
      const double dn = gram_norm_vec(G, delta, rows, d);
      if (!std::isfinite(dn)) break;
      u -= delta;
      if (dn <= opts.fixed_point_tol * scale_of(u) && u.allFinite()) return u;
    }
  } catch (const Error& e) {
    if (!is_solver_failure(e) && e.code() != ErrorCode::NoConvergence) throw;
  }
  throw Error(ErrorCode::NoConvergence, std::string(what) + ": Euler-Lagrange solve did not converge");
}

// Block-tridiagonal approximation of the Hessian of E^K, blocks scalar (⊗ I_d).
class PathPreconditioner {
 public:
  PathPreconditioner(const std::vector<FourierCurve>& curves, const MetricEvaluator& metric, int threads) {
    const int K = static_cast<int>(curves.size()) - 1;
    n_ = K - 1;
    rows_ = curves.front().rows();
    d_ = curves.front().dim();
    std::vector<MatrixXd> G(K + 1);
    parallel_for(K + 1, threads, [&](int k) { G[k] = metric.scalar_gram(curves[k]); });
    // Segment blocks Ḡ_k = (G_{k−1} + G_k)/2, k = 1..K.
    std::vector<MatrixXd> seg(K + 1);
    for (int k = 1; k <= K; ++k) seg[k] = 0.5 * (G[k - 1] + G[k]);
    off_.resize(n_);
    S_.resize(n_);
    for (int i = 0; i < n_; ++i) {
      const int k = i + 1;
      MatrixXd diag = 2.0 * K * (seg[k] + seg[k + 1]);
      if (i + 1 < n_) off_[i] = -2.0 * K * seg[k + 1];
      if (i > 0) diag -= off_[i - 1].transpose() * S_[i - 1].solve(off_[i - 1]);
      S_[i].compute(diag);
      if (S_[i].info() != Eigen::Success) throw Error(ErrorCode::DegenerateCurve, "path preconditioner not SPD");
    }
  }

  VectorXd solve(const VectorXd& r) const {
    const Eigen::Index bs = static_cast<Eigen::Index>(rows_) * d_;
    std::vector<RowMatrix> Y(n_);
    for (int i = 0; i < n_; ++i) {
      Y[i] = as_rows(r.segment(i * bs, bs), rows_, d_);
      if (i > 0) Y[i] -= off_[i - 1].transpose() * S_[i - 1].solve(Y[i - 1]);
    }
    VectorXd x(r.size());
    RowMatrix next;
    for (int i = n_ - 1; i >= 0; --i) {
      RowMatrix rhs = Y[i];
      if (i + 1 < n_) rhs -= off_[i] * next;
      next = S_[i].solve(rhs);
      x.segment(i * bs, bs) = as_vec(next);
    }
    return x;
  }

 private:
  int n_ = 0, rows_ = 0, d_ = 0;
  std::vector<MatrixXd> off_;
  std::vector<Eigen::LLT<MatrixXd>> S_;
};

struct PathEval {
  bool finite = true;
  double energy = 0;
  VectorXd grad;  // interior nodes only
};

PathEval evaluate_path(const std::vector<FourierCurve>& curves, const EnergyModel& model, int threads,
                       bool with_grad) {
  const int K = static_cast<int>(curves.size()) - 1;
  const Eigen::Index bs = curves.front().size();
  std::vector<EnergyValue> vals(K);
  std::vector<VectorXd> dh(K), dc(K);
  parallel_for(K, threads, [&](int s) {
    const FourierCurve delta = curves[s + 1] - curves[s];
    if (with_grad)
      vals[s] = model.gradient(curves[s], delta, s > 0 ? &dh[s] : nullptr, s + 1 < K ? &dc[s] : nullptr);
    else
      vals[s] = model.value(curves[s], delta);
  });
  PathEval out;
  for (int s = 0; s < K; ++s) {
    if (!vals[s].is_finite()) {
      out.finite = false;
      return out;
    }
    out.energy += vals[s].value();
  }
  out.energy *= K;
  if (with_grad) {
    out.grad = VectorXd::Zero((K - 1) * bs);
    for (int s = 0; s < K; ++s) {
      if (s > 0) out.grad.segment((s - 1) * bs, bs) += K * dh[s];
      if (s + 1 < K) out.grad.segment(s * bs, bs) += K * dc[s];
    }
  }
  return out;
}

void set_interior(std::vector<FourierCurve>& curves, const VectorXd& x) {
  const Eigen::Index bs = curves.front().size();
  for (size_t k = 1; k + 1 < curves.size(); ++k) curves[k].coeffs() = x.segment((k - 1) * bs, bs);
}

VectorXd get_interior(const std::vector<FourierCurve>& curves) {
  const Eigen::Index bs = curves.front().size();
  VectorXd x((curves.size() - 2) * bs);
  for (size_t k = 1; k + 1 < curves.size(); ++k) x.segment((k - 1) * bs, bs) = curves[k].coeffs();
  return x;
}

// Trial evaluation that maps domain violations to "reject".
bool try_evaluate(std::vector<FourierCurve>& curves, const VectorXd& x, const EnergyModel& model, int threads,
                  PathEval& out) {
  set_interior(curves, x);
  for (size_t k = 1; k + 1 < curves.size(); ++k)
    if (min_speed(curves[k], model.M()) <= kSpeedFloor) return false;
  try {
    out = evaluate_path(curves, model, threads, true);
  } catch (const Error& e) {
    if (is_solver_failure(e)) return false;
    throw;
  }
  return out.finite && std::isfinite(out.energy) && out.grad.allFinite();
}

}  // namespace

EnergyValue discrete_path_energy(const DiscretePath& path, const EnergyModel& model, int threads) {
  check_path(path);
  for (const auto& c : path.curves)
    if (min_speed(c, model.M()) <= kSpeedFloor) throw Error(ErrorCode::DegenerateCurve, "path leaves immersions");
  const PathEval e = evaluate_path(path.curves, model, worker_count(threads), false);
  if (!e.finite) return EnergyValue::infinite();
  return EnergyValue(e.energy);
}

EnergyValue discrete_path_energy(const DiscretePath& path, const MetricWeights& weights, const EnergyKind& kind,
                                 int M) {
  check_path(path);
  return discrete_path_energy(path, EnergyModel(weights, kind, path[0].order(), M));
}

std::vector<double> segment_energies(const DiscretePath& path, const EnergyModel& model) {
  check_path(path);
  const int K = path.K();
  std::vector<double> out(K);
  for (int k = 0; k < K; ++k) out[k] = K * model.value(path[k], path[k + 1] - path[k]).value_or_inf();
  return out;
}

DiscretePath linear_path(const FourierCurve& a, const FourierCurve& b, int K) {
  require_same_shape(a, b, "linear_path");
  if (K < 1) throw Error(ErrorCode::InvalidArgument, "K must be >= 1");
  DiscretePath p;
  const FourierCurve diff = b - a;
  for (int k = 0; k <= K; ++k) p.curves.push_back(k == K ? b : a + (static_cast<double>(k) / K) * diff);
  return p;
}

DiscretePath refine_path(const DiscretePath& coarse) {
  check_path(coarse);
  DiscretePath fine;
  for (int k = 0; k < coarse.K(); ++k) {
    fine.curves.push_back(coarse[k]);
    fine.curves.push_back(0.5 * (coarse[k] + coarse[k + 1]));
  }
  fine.curves.push_back(coarse.curves.back());
  return fine;
}

DiscretePath solve_bvp(const FourierCurve& c_a, const FourierCurve& c_b, int K, const EnergyModel& model,
                       const SolverOptions& opts, BvpReport* report, const DiscretePath* warm_start) {
  require_same_shape(c_a, c_b, "solve_bvp");
  if (K < 1) throw Error(ErrorCode::InvalidArgument, "K must be >= 1");
  if (c_a.order() != model.N()) throw Error(ErrorCode::InvalidArgument, "curve order differs from the model's N");
  if (min_speed(c_a, model.M()) <= kSpeedFloor || min_speed(c_b, model.M()) <= kSpeedFloor)
    throw Error(ErrorCode::DegenerateCurve, "endpoint is not immersed");
  const int threads = worker_count(opts.threads);

  DiscretePath path;
  if (warm_start) {
    if (warm_start->K() != K) throw Error(ErrorCode::InvalidArgument, "warm start has the wrong K");
    path = *warm_start;
    path.curves.front() = c_a;
    path.curves.back() = c_b;
  } else if (opts.multilevel && K % 2 == 0 && K >= 8) {
    SolverOptions coarse_opts = opts;
    const DiscretePath coarse = solve_bvp(c_a, c_b, K / 2, model, coarse_opts);
    path = refine_path(coarse);
  } else {
    path = linear_path(c_a, c_b, K);
  }
  for (const auto& c : path.curves)
    if (min_speed(c, model.M()) <= kSpeedFloor)
      throw Error(ErrorCode::DegenerateInit, "initial path leaves the immersion set");

  BvpReport rep;
  if (K == 1) {
    const EnergyValue e = discrete_path_energy(path, model, threads);
    rep.initial_energy = rep.energy = e.value_or_inf();
    if (report) *report = rep;
    return path;
  }

  std::vector<FourierCurve> curves = path.curves;
  PathEval cur = evaluate_path(curves, model, threads, true);
  if (!cur.finite) throw Error(ErrorCode::InfiniteEnergy, "initial path has infinite energy");
  VectorXd x = get_interior(curves);

  auto precond = std::make_unique<PathPreconditioner>(curves, model.metric(), threads);
  VectorXd pg = precond->solve(cur.grad);
  double gnorm = std::sqrt(std::max(0.0, cur.grad.dot(pg)));
  rep.initial_energy = cur.energy;
  rep.initial_grad_norm = gnorm;
  const double target = opts.grad_tol * (1.0 + gnorm);

  std::deque<VectorXd> S, Y;
  std::deque<double> rho;
  int it = 0;
  int since_refresh = 0;
  bool last_failed = false;
  while (gnorm > target) {
    if (it >= opts.max_iters)
      throw Error(ErrorCode::MaxIters, "BVP optimizer reached max_iters with gradient norm " + std::to_string(gnorm));
    // Two-loop recursion with H0 = P^{-1}.
    VectorXd q = cur.grad;
    std::vector<double> alpha(S.size());
    for (int i = static_cast<int>(S.size()) - 1; i >= 0; --i) {
      alpha[i] = rho[i] * S[i].dot(q);
      q -= alpha[i] * Y[i];
    }
    VectorXd dir = precond->solve(q);
    for (size_t i = 0; i < S.size(); ++i) {
      const double beta = rho[i] * Y[i].dot(dir);
      dir += (alpha[i] - beta) * S[i];
    }
    dir = -dir;
    double slope = cur.grad.dot(dir);
    if (!(slope < 0)) {
      S.clear(), Y.clear(), rho.clear();
      dir = -pg;
      slope = cur.grad.dot(dir);
    }

    // Backtracking; near round-off accept a step that does not raise the
    // energy beyond rounding and lowers the gradient norm.
    double step = 1.0;
    PathEval trial;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      const VectorXd xt = x + step * dir;
      if (try_evaluate(curves, xt, model, threads, trial)) {
        const double fuzz = 64 * std::numeric_limits<double>::epsilon() * std::abs(cur.energy);
        if (trial.energy <= cur.energy + 1e-4 * step * slope) accepted = true;
        else if (trial.energy <= cur.energy + fuzz) {
          const VectorXd tp = precond->solve(trial.grad);
          if (trial.grad.dot(tp) < gnorm * gnorm) accepted = true;
        }
        if (accepted) {
          const VectorXd s = xt - x;
          const VectorXd y = trial.grad - cur.grad;
          const double sy = s.dot(y);
          if (sy > 1e-14 * s.norm() * y.norm()) {
            S.push_back(s), Y.push_back(y), rho.push_back(1.0 / sy);
            if (static_cast<int>(S.size()) > opts.lbfgs_memory) S.pop_front(), Y.pop_front(), rho.pop_front();
          }
          x = xt;
          cur = std::move(trial);
          break;
        }
      }
      step *= 0.5;
    }
    set_interior(curves, x);
    ++it;
    if (!accepted) {
      if (last_failed)
        throw Error(ErrorCode::MaxIters, "BVP line search stalled with gradient norm " + std::to_string(gnorm));
      last_failed = true;
      S.clear(), Y.clear(), rho.clear();
      precond = std::make_unique<PathPreconditioner>(curves, model.metric(), threads);
      since_refresh = 0;
    } else {
      last_failed = false;
      if (++since_refresh >= 25) {
        precond = std::make_unique<PathPreconditioner>(curves, model.metric(), threads);
        since_refresh = 0;
      }
    }
    pg = precond->solve(cur.grad);
    gnorm = std::sqrt(std::max(0.0, cur.grad.dot(pg)));
  }
  rep.iterations = it;
  rep.energy = cur.energy;
  rep.grad_norm = gnorm;
  if (report) *report = rep;
  path.curves = std::move(curves);
  return path;
}

DiscretePath solve_bvp(const FourierCurve& c_a, const FourierCurve& c_b, int K, const MetricWeights& weights,
                       const EnergyKind& kind, int M, const SolverOptions& opts) {
  return solve_bvp(c_a, c_b, K, EnergyModel(weights, kind, c_a.order(), M), opts);
}

FourierCurve el_forward_step(const EnergyModel& model, const FourierCurve& c_prev, const FourierCurve& c_mid,
                             const FourierCurve& x, const SolverOptions& opts) {
  require_same_shape(c_prev, x, "el_forward_step");
  require_same_shape(c_mid, x, "el_forward_step");
  const int rows = x.rows(), d = x.dim();
  VectorXd g2;
  const EnergyValue e = model.gradient(c_prev, x, nullptr, &g2);
  if (!e.is_finite()) throw Error(ErrorCode::InfiniteEnergy, "first segment has infinite energy");
  const MatrixXd G = model.metric().scalar_gram(c_mid);
  auto F = [&](const VectorXd& y, VectorXd& r) {
    VectorXd dh;
    if (!model.gradient(c_mid, as_curve(x, y), &dh, nullptr).is_finite()) return false;
    r = g2 + dh;
    return true;
  };
  // ∂_y F ≈ −2G.
  return as_curve(x, solve_el(F, x.coeffs(), G, -2.0, rows, d, opts, "exp step"));
}

FourierCurve el_midpoint(const EnergyModel& model, const FourierCurve& c0, const FourierCurve& y,
                         const SolverOptions& opts) {
  require_same_shape(c0, y, "el_midpoint");
  const int rows = y.rows(), d = y.dim();
  const MatrixXd G = model.metric().scalar_gram(c0 + 0.5 * y);
  auto F = [&](const VectorXd& xv, VectorXd& r) {
    const FourierCurve xc = as_curve(y, xv);
    VectorXd g2, dh;
    if (!model.gradient(c0, xc, nullptr, &g2).is_finite()) return false;
    if (!model.gradient(c0 + xc, y - xc, &dh, nullptr).is_finite()) return false;
    r = g2 + dh;
    return true;
  };
  // ∂_x F ≈ 4G.
  return as_curve(y, solve_el(F, 0.5 * y.coeffs(), G, 4.0, rows, d, opts, "log step"));
}

FourierCurve exp2_displacement(const EnergyModel& model, const FourierCurve& c0, const FourierCurve& v,
                               const SolverOptions& opts) {
  const FourierCurve x = 0.5 * v;
  return x + el_forward_step(model, c0, c0 + x, x, opts);
}

FourierCurve log2_displacement(const EnergyModel& model, const FourierCurve& c0, const FourierCurve& y,
                               const SolverOptions& opts) {
  return 2.0 * el_midpoint(model, c0, y, opts);
}

FourierCurve exp2(const FourierCurve& c0, const FourierCurve& v, const EnergyModel& model,
                  const SolverOptions& opts) {
  return c0 + exp2_displacement(model, c0, v, opts);
}

FourierCurve log2(const FourierCurve& c0, const FourierCurve& c2, const EnergyModel& model,
                  const SolverOptions& opts) {
  return log2_displacement(model, c0, c2 - c0, opts);
}

DiscretePath exp_k(const FourierCurve& c0, const FourierCurve& v, int K, const EnergyModel& model,
                   const SolverOptions& opts) {
  require_same_shape(c0, v, "exp_k");
  if (K < 1) throw Error(ErrorCode::InvalidArgument, "K must be >= 1");
  DiscretePath path;
  path.curves.reserve(K + 1);
  path.curves.push_back(c0);
  FourierCurve x = (1.0 / K) * v;
  path.curves.push_back(c0 + x);
  for (int k = 1; k < K; ++k) {
    FourierCurve y;
    try {
      y = el_forward_step(model, path.curves[k - 1], path.curves[k], x, opts);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::NoConvergence)
        throw Error(ErrorCode::NoConvergence, "exp_k step " + std::to_string(k) + ": " + e.what());
      throw;
    }
    path.curves.push_back(path.curves[k] + y);
    x = std::move(y);
  }
  return path;
}

Eigen::VectorXd el_residual(const DiscretePath& path, int k, const EnergyModel& model) {
  check_path(path);
  if (k < 1 || k >= path.K()) throw Error(ErrorCode::InvalidArgument, "el_residual needs an interior node");
  VectorXd g2, dh;
  model.gradient(path[k - 1], path[k] - path[k - 1], nullptr, &g2).value();
  model.gradient(path[k], path[k + 1] - path[k], &dh, nullptr).value();
  return path.K() * (g2 + dh);
}

}  // namespace sobcurve
