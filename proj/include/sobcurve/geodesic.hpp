#pragma once

#include <vector>

#include "sobcurve/curve.hpp"
#include "sobcurve/energy.hpp"

namespace sobcurve {

// K+1 curves c_0..c_K with step τ = 1/K.
struct DiscretePath {
  std::vector<FourierCurve> curves;

  int K() const { return static_cast<int>(curves.size()) - 1; }
  double step() const { return 1.0 / K(); }
  const FourierCurve& operator[](int k) const { return curves[k]; }
};

struct SolverOptions {
  // BVP: stop once the preconditioned gradient norm is below grad_tol·(1 + its initial value).
  double grad_tol = 1e-8;
  int max_iters = 5000;
  int lbfgs_memory = 12;
  bool multilevel = false;
  // Euler–Lagrange steps: relative update size in the g-norm.
  double fixed_point_tol = 1e-10;
  int fixed_point_max_iters = 50;
  bool newton_fallback = true;
  double newton_fd_step = 1e-6;
  // Caps worker threads for segment assembly; 0 = SOBCURVE_THREADS or hardware.
  int threads = 0;
};

struct BvpReport {
  int iterations = 0;
  double initial_energy = 0;
  double energy = 0;
  double initial_grad_norm = 0;
  double grad_norm = 0;
};

// K·Σ W[c_{k−1}, c_k].
EnergyValue discrete_path_energy(const DiscretePath& path, const EnergyModel& model, int threads = 0);
EnergyValue discrete_path_energy(const DiscretePath& path, const MetricWeights& weights, const EnergyKind& kind,
                                 int M);

// Per-segment energies K·W[c_{k−1}, c_k] (equidistribution diagnostic).
std::vector<double> segment_energies(const DiscretePath& path, const EnergyModel& model);

DiscretePath linear_path(const FourierCurve& a, const FourierCurve& b, int K);
// Inserts the midpoint of every segment.
DiscretePath refine_path(const DiscretePath& coarse);

// Discrete geodesic with fixed endpoints. A warm start, if given, must have K+1 curves.
DiscretePath solve_bvp(const FourierCurve& c_a, const FourierCurve& c_b, int K, const EnergyModel& model,
                       const SolverOptions& opts = {}, BvpReport* report = nullptr,
                       const DiscretePath* warm_start = nullptr);
DiscretePath solve_bvp(const FourierCurve& c_a, const FourierCurve& c_b, int K, const MetricWeights& weights,
                       const EnergyKind& kind, int M, const SolverOptions& opts = {});

// Displacement forms. Given c_prev and x = c_mid − c_prev, returns y = c_next − c_mid with
// W_{,2}[c_prev, c_mid] + W_{,1}[c_mid, c_next] = 0.
FourierCurve el_forward_step(const EnergyModel& model, const FourierCurve& c_prev, const FourierCurve& c_mid,
                             const FourierCurve& x, const SolverOptions& opts);
// Given c0 and y = c2 − c0, returns x = c1 − c0 with W_{,2}[c0, c1] + W_{,1}[c1, c2] = 0.
FourierCurve el_midpoint(const EnergyModel& model, const FourierCurve& c0, const FourierCurve& y,
                         const SolverOptions& opts);

// Exp²_{c0}(v) − c0 and Log²_{c0}(c0 + y).
FourierCurve exp2_displacement(const EnergyModel& model, const FourierCurve& c0, const FourierCurve& v,
                               const SolverOptions& opts = {});
FourierCurve log2_displacement(const EnergyModel& model, const FourierCurve& c0, const FourierCurve& y,
                               const SolverOptions& opts = {});

FourierCurve exp2(const FourierCurve& c0, const FourierCurve& v, const EnergyModel& model,
                  const SolverOptions& opts = {});
FourierCurve log2(const FourierCurve& c0, const FourierCurve& c2, const EnergyModel& model,
                  const SolverOptions& opts = {});
DiscretePath exp_k(const FourierCurve& c0, const FourierCurve& v, int K, const EnergyModel& model,
                   const SolverOptions& opts = {});

// Discrete Euler–Lagrange residual K(W_{,2}[c_{k−1},c_k] + W_{,1}[c_k,c_{k+1}]) at node k, coefficient layout.
Eigen::VectorXd el_residual(const DiscretePath& path, int k, const EnergyModel& model);

}  // namespace sobcurve
