#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sobcurve/geodesic.hpp"
#include "sobcurve/transport.hpp"

namespace sobcurve {

// ε as a function of K: coef·K^{−power}. Accepted spellings: a number, "1/K",
// "1/sqrtK", "tau", "sqrt(tau)", "[c*]tau^p", "[c*]K^-p".
struct EpsilonRule {
  double coef = 1.0;
  double power = 1.0;

  static EpsilonRule fixed(double eps) { return {eps, 0.0}; }
  static EpsilonRule parse(const std::string& text);
  double at(int K) const;
  std::string str() const;
};

struct KindRule {
  bool rat = true;
  EpsilonRule eps;

  static KindRule make_rat() { return {}; }
  static KindRule make_reg(EpsilonRule e) { return {false, e}; }
  EnergyKind at(int K) const { return rat ? EnergyKind::rat() : EnergyKind::reg(eps.at(K)); }
  std::string str() const { return rat ? "rat" : "reg(eps=" + eps.str() + ")"; }
};

struct SweepSetup {
  MetricWeights weights;
  KindRule kind;
  int N = 20;
  int M = 80;
  std::vector<int> Ks;
  SolverOptions opts;
  int threads = 0;
};

struct SweepTable {
  std::vector<std::string> columns;  // columns[0] == "K"
  std::vector<std::vector<double>> rows;

  std::vector<double> column(size_t j) const;
  // Negative log-log slope of column j over the final half of the rows.
  double slope(size_t j) const;
};

// Called once per finished row, in K order.
using RowSink = std::function<void(const std::vector<double>&)>;

// Least-squares slope of −log(err) against log(K).
double fitted_slope(const std::vector<double>& K, const std::vector<double>& err);
// Same over the final half (at least two points) of the sequence.
double final_half_slope(const std::vector<double>& K, const std::vector<double>& err);

// L²_t W^r_θ distance between a K-path and a reference with K_ref divisible by K, r = 0, 1, 2.
std::vector<double> path_errors(const DiscretePath& path, const DiscretePath& ref);

DiscretePath reference_geodesic(const FourierCurve& c_a, const FourierCurve& c_b, int K_ref,
                                const SweepSetup& setup);

SweepTable sweep_geodesic(const SweepSetup& setup, const FourierCurve& c_a, const FourierCurve& c_b,
                          const DiscretePath& ref, const RowSink& sink = {});
SweepTable sweep_exp(const SweepSetup& setup, const FourierCurve& c0, const FourierCurve& v,
                     const FourierCurve& ref_end, const RowSink& sink = {});
// Constant field w at the unit circle against the exact Christoffel operator (m = 2).
SweepTable sweep_covderiv(const SweepSetup& setup, const FourierCurve& v, const FourierCurve& w, bool centered,
                          const RowSink& sink = {});
// Transport of w0 along the nodes k·(K_ref/K) of a fine path.
SweepTable sweep_transport(const SweepSetup& setup, const DiscretePath& fine_path, const FourierCurve& w0,
                           const FourierCurve& ref_end, const RowSink& sink = {});

struct CurvatureSweepOptions {
  bool centered = true;
  double C = 1.0;
  std::optional<EpsilonRule> eps_out, eps_in;  // Reg only; defaults follow the schedule
  std::optional<double> beta;
};
// Sectional curvature at the unit circle against the exact value.
SweepTable sweep_curvature(const SweepSetup& setup, const FourierCurve& v, const FourierCurve& w,
                           const CurvatureSweepOptions& copts, const RowSink& sink = {});

// Manifest-based path I/O: manifest.json lists node files relative to its directory.
void write_path(const std::string& dir, const DiscretePath& path);
DiscretePath read_path(const std::string& manifest);

}  // namespace sobcurve
