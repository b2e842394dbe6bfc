#pragma once

#include <functional>
#include <vector>

#include "sobcurve/geodesic.hpp"

namespace sobcurve {

using TangentField = std::function<FourierCurve(const FourierCurve&)>;

// Step exponent and ε values for nested covariant quotients. The ε values are
// used only when the energy is Reg.
struct CurvatureSchedule {
  double beta = 2.0;
  double eps_out = 0;
  double eps_in = 0;
  bool centered = false;

  // β = 2, ε_out = τ, ε_in = τ².
  static CurvatureSchedule one_sided(double tau);
  // β = 3/2, ε_out = τ²/C, ε_in = τ³/C.
  static CurvatureSchedule central(double tau, double C = 1.0);
};

// Schild's ladder rung: transports w from c to c + τv. Returns (z − c − τv)/τ.
FourierCurve schild_step(const FourierCurve& c, const FourierCurve& v, const FourierCurve& w, double tau,
                         const EnergyModel& model, const SolverOptions& opts = {});

// w_0..w_K transported along the path.
std::vector<FourierCurve> transport_path_all(const DiscretePath& path, const FourierCurve& w0,
                                             const EnergyModel& model, const SolverOptions& opts = {});
FourierCurve transport_path(const DiscretePath& path, const FourierCurve& w0, const EnergyModel& model,
                            const SolverOptions& opts = {});

// α_k = ½ W_{,11}[c_k,c_k](K(c_{k+1} − c_k), w_k) for k = 0..K−1.
std::vector<double> transport_inner_products(const DiscretePath& path, const std::vector<FourierCurve>& w,
                                             const EnergyModel& model);

// Takes w given at c + τv back to c: returns P^{-1}_{c,c+τv}(τw)/τ.
FourierCurve inverse_transport(const FourierCurve& c, const FourierCurve& v, double tau,
                               const FourierCurve& w_at_end, const EnergyModel& model,
                               const SolverOptions& opts = {});

FourierCurve cov_deriv(const FourierCurve& c, const FourierCurve& v, const TangentField& w_field, double tau,
                       const EnergyModel& model, const SolverOptions& opts = {}, bool centered = false);

// Nested quotients with z extended as a constant field. For Reg energies the
// model's ε is replaced by the schedule's ε_out / ε_in.
FourierCurve riemann_tensor(const FourierCurve& c, const FourierCurve& v, const FourierCurve& w,
                            const FourierCurve& z, double tau, const CurvatureSchedule& schedule,
                            const EnergyModel& model, const SolverOptions& opts = {});

double sectional_curvature(const FourierCurve& c, const FourierCurve& v, const FourierCurve& w, double tau,
                           const CurvatureSchedule& schedule, const EnergyModel& model,
                           const SolverOptions& opts = {});

}  // namespace sobcurve
