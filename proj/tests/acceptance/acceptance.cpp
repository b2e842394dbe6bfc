// Acceptance run: one PASS/FAIL line per criterion on stdout, progress on stderr.
// Usage: acceptance [criterion numbers...]   (default: all)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sobcurve/energy.hpp"
#include "sobcurve/errors.hpp"
#include "sobcurve/experiments.hpp"
#include "sobcurve/geodesic.hpp"
#include "sobcurve/metric.hpp"
#include "sobcurve/oracle.hpp"
#include "sobcurve/shapes.hpp"
#include "sobcurve/transport.hpp"

using namespace sobcurve;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

void progress(const std::string& s) { std::fprintf(stderr, "  %s\n", s.c_str()); }

void log_table(const SweepTable& t) {
  for (const auto& r : t.rows) {
    std::string line;
    for (size_t j = 0; j < r.size(); ++j) line += (j ? "  " : "") + fmt(j ? "%.4e" : "%g", r[j]);
    progress(line);
  }
}

double slope_last(const SweepTable& t, size_t col, size_t n) {
  const auto K = t.column(0), e = t.column(col);
  return fitted_slope(std::vector<double>(K.end() - n, K.end()), std::vector<double>(e.end() - n, e.end()));
}

const MetricWeights kUnit = MetricWeights::unit(2);
const MetricWeights kWeighted({1e-4, 1, 1e-2});

FourierCurve mode1(int N, double xc, double xs, double yc, double ys) {
  FourierCurve f(2, N);
  f.set_cos(1, Eigen::Vector2d(xc, yc));
  f.set_sin(1, Eigen::Vector2d(xs, ys));
  return f;
}

FourierCurve perturbed_circle(int N, std::mt19937& rng, double amp) {
  std::uniform_real_distribution<double> u(-1, 1);
  FourierCurve c = circle_curve(N);
  for (int r = 0; r < c.rows(); ++r)
    for (int k = 0; k < 2; ++k) c.matrix()(r, k) += amp * u(rng) / std::pow(1.0 + (r + 1) / 2, 3);
  return c;
}

FourierCurve random_field(int N, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  FourierCurve c(2, N);
  for (int r = 0; r < c.rows(); ++r)
    for (int k = 0; k < 2; ++k) c.matrix()(r, k) = u(rng) / std::pow(1.0 + (r + 1) / 2, 2);
  return c;
}

FourierCurve rotate(const FourierCurve& c, double phi) {
  FourierCurve out = c;
  Eigen::Matrix2d R;
  R << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
  out.matrix() = c.matrix() * R.transpose();
  return out;
}

FourierCurve translate(const FourierCurve& c, double x, double y) {
  FourierCurve out = c;
  out.matrix()(0, 0) += x;
  out.matrix()(0, 1) += y;
  return out;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// 1. Closed-form t-integrals against 64-node Gauss–Legendre, q uniform in (0, rp).
Outcome closed_forms() {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> u(0.2, 2.0), sgn(-1.5, 1.5), frac(0.0, 1.0);
  double worst[5] = {0, 0, 0, 0, 0};
  int n = 0;
  while (n < 1000) {
    const double r = u(rng), p = u(rng), q = frac(rng) * r * p;
    const double rho = sgn(rng), sigma = sgn(rng), tau = sgn(rng);
    if (!(q > 0)) continue;
    const TimeIntegrals a = closed_form_time_integrals(r, p, q, rho, sigma, tau);
    const TimeIntegrals b = quadrature_time_integrals(r, p, q, rho, sigma, tau, 64);
    const double A[5] = {a.w0, a.w1, a.w2a, a.w2b, a.w2c}, B[5] = {b.w0, b.w1, b.w2a, b.w2b, b.w2c};
    for (int j = 0; j < 5; ++j) worst[j] = std::max(worst[j], rel(A[j], B[j]));
    ++n;
  }
  const double w = *std::max_element(worst, worst + 5);
  return {w <= 1e-9, fmt("1000 tuples, max rel err per integral %.1e %.1e %.1e %.1e %.1e (tol 1e-9)", worst[0],
                         worst[1], worst[2], worst[3], worst[4])};
}

// 2. Sectional curvature of the unit circle, v = (cos, 0), w = (0, cos), unit weights.
Outcome circle_curvature() {
  TrigPolynomial v(2), w(2);
  v[0].set_cos(1, 1.0);
  w[1].set_cos(1, 1.0);
  const CircleCurvature k = sectional_curvature_circle(v, w, kUnit);
  const double gvv = metric_derivatives_unit_speed(v, v, v, v, kUnit).g;
  const double ek = std::abs(k.kappa + 31 / (117 * M_PI));
  const double en = std::abs(k.numerator + 31 * M_PI / 13);
  const double eg = std::abs(gvv - 3 * M_PI);
  return {ek <= 1e-12 && en <= 1e-12 && eg <= 1e-12,
          fmt("kappa=%.15f (err %.1e), numerator err %.1e, g(v,v) err %.1e", k.kappa, ek, en, eg)};
}

// 3. Christoffel golden values: the 41/728 family and the /10569794144 family.
Outcome christoffel_golden() {
  double err = 0;
  auto check = [&](const TrigSeries& s, std::vector<double> cos, std::vector<double> sin) {
    for (int k = 0; k <= std::max(3, s.order()); ++k) {
      const double ec = k < static_cast<int>(cos.size()) ? cos[k] : 0.0;
      const double es = k < static_cast<int>(sin.size()) ? sin[k] : 0.0;
      err = std::max({err, std::abs(s.cos_coeff(k) - ec), std::abs(s.sin_coeff(k) - es)});
    }
  };
  TrigPolynomial v(2), w(2);
  v[0].set_cos(1, 1.0);
  w[1].set_cos(1, 1.0);
  const TrigPolynomial G1 = christoffel_circle(v, w, kUnit);
  check(G1[0], {}, {0, -1.0 / 8, 0, 41.0 / 728});
  check(G1[1], {0, -3.0 / 8, 0, 41.0 / 728}, {});

  const double den = 10569794144.0;
  const TrigPolynomial vv = TrigPolynomial::from_curve(mode1(1, -0.5, 0, 0, 1));
  const TrigPolynomial ww = TrigPolynomial::from_curve(mode1(1, 1, 0, 0, 0.5));
  const TrigPolynomial G2 = christoffel_circle(vv, ww, kWeighted);
  check(G2[0], {0, 1664479667 / den, 0, -390844727 / den}, {});
  check(G2[1], {}, {0, -3724012061 / den, 0, 293982871 / den});
  return {err <= 1e-12, fmt("max coefficient error %.1e over both families (tol 1e-12)", err)};
}

// 4. Rat central curvature at the circle, N = 20, M = 80, K = 4..512.
Outcome curvature_convergence() {
  SweepSetup s;
  s.weights = kUnit;
  s.kind = KindRule::make_rat();
  s.N = 20;
  s.M = 80;
  s.Ks = {4, 8, 16, 32, 64, 128, 256, 512};
  const SweepTable t = sweep_curvature(s, mode1(20, 1, 0, 0, 0), mode1(20, 0, 0, 1, 0), {});
  log_table(t);
  const double slope = slope_last(t, 2, 4);
  return {slope >= 1.7, fmt("slope over K=64..512: %.3f (need >= 1.7), err(512)=%.2e", slope, t.rows.back()[2])};
}

// 5. Reg one-sided covariant derivative at the circle, ε = τ and ε = √τ.
Outcome covderiv_convergence() {
  const int N = 20;
  SweepSetup s;
  s.weights = kWeighted;
  s.N = N;
  s.M = 4 * N;
  s.Ks = {4, 8, 16, 32, 64, 128, 256};
  const FourierCurve v = mode1(N, -0.5, 0, 0, 1), w = mode1(N, 1, 0, 0, 0.5);
  s.kind = KindRule::make_reg(EpsilonRule::parse("tau"));
  const SweepTable a = sweep_covderiv(s, v, w, false);
  progress("eps = tau");
  log_table(a);
  s.kind = KindRule::make_reg(EpsilonRule::parse("sqrt(tau)"));
  const SweepTable b = sweep_covderiv(s, v, w, false);
  progress("eps = sqrt(tau)");
  log_table(b);
  const double sa = slope_last(a, 1, 4), sb = slope_last(b, 1, 4);
  return {std::abs(sa - 1.0) <= 0.3 && std::abs(sb - 0.5) <= 0.2,
          fmt("slopes over K=32..256: eps=tau %.3f (1.0+-0.3), eps=sqrt(tau) %.3f (0.5+-0.2)", sa, sb)};
}

// 6. Exp^K at the circle, v = (−cos/2, sin), N = 30, M = 120, reference Rat K = 8192.
Outcome exp_convergence() {
  const int N = 30;
  SweepSetup s;
  s.weights = kWeighted;
  s.N = N;
  s.M = 120;
  s.Ks = {8, 16, 32, 64, 128, 256, 512};
  const FourierCurve c0 = circle_curve(N), v = mode1(N, -0.5, 0, 0, 1);
  const FourierCurve ref = exp_k(c0, v, 8192, EnergyModel(kWeighted, EnergyKind::rat(), N, 120)).curves.back();
  progress("reference done");
  s.kind = KindRule::make_rat();
  const SweepTable a = sweep_exp(s, c0, v, ref);
  progress("rat");
  log_table(a);
  s.kind = KindRule::make_reg(EpsilonRule::parse("1/sqrtK"));
  const SweepTable b = sweep_exp(s, c0, v, ref);
  progress("reg eps = 1/sqrt(K)");
  log_table(b);
  const double sa = a.slope(1), sb = b.slope(1);
  return {std::abs(sa - 1.0) <= 0.2 && std::abs(sb - 0.5) <= 0.2,
          fmt("slopes over K=64..512: rat %.3f (1.0+-0.2), reg eps=1/sqrtK %.3f (0.5+-0.2)", sa, sb)};
}

// 7. BVP self-convergence circle → star, N = 40, reference Rat K = 1024, L²_t W²_θ error.
Outcome bvp_convergence() {
  const int N = 40;
  SweepSetup s;
  s.weights = kWeighted;
  s.N = N;
  s.M = 4 * N;
  s.Ks = {4, 8, 16, 32, 64, 128};
  const FourierCurve a = circle_curve(N), b = star_curve(N);
  const DiscretePath ref = reference_geodesic(a, b, 1024, s);
  progress("reference done");
  s.kind = KindRule::make_rat();
  const SweepTable r = sweep_geodesic(s, a, b, ref);
  progress("rat");
  log_table(r);
  s.kind = KindRule::make_reg(EpsilonRule::parse("1/K"));
  const SweepTable g = sweep_geodesic(s, a, b, ref);
  progress("reg eps = 1/K");
  log_table(g);
  const double sr = r.slope(3), sg = g.slope(3);
  return {std::abs(sr - 2.0) <= 0.4 && std::abs(sg - 1.0) <= 0.3,
          fmt("L2W2 slopes over K=16..128: rat %.3f (2.0+-0.4), reg eps=1/K %.3f (1.0+-0.3)", sr, sg)};
}

// 8. Energy properties on 200 random nearby immersed pairs.
Outcome energy_properties() {
  std::mt19937 rng(88);
  const int N = 6, M = 40;
  const double eps = 1e-3, h = 1e-5;
  double diag = 0, sym = 0, inv = 0, order = 0, grad = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const FourierCurve a = perturbed_circle(N, rng, 0.3);
    const FourierCurve b = a + 0.05 * random_field(N, rng);
    const auto rat = [&](const FourierCurve& x, const FourierCurve& y) { return w_rat(x, y, kWeighted, M).value(); };
    const auto reg = [&](const FourierCurve& x, const FourierCurve& y) { return w_reg(x, y, kWeighted, eps, M); };
    diag = std::max({diag, std::abs(rat(a, a)), std::abs(reg(a, a))});
    const double wr = rat(a, b), wg = reg(a, b);
    sym = std::max({sym, rel(rat(b, a), wr), rel(reg(b, a), wg)});
    const double phi = 0.1 + 0.03 * trial;
    const FourierCurve ra = rotate(a, phi), rb = rotate(b, phi);
    const FourierCurve ta = translate(a, 1.5, -0.7), tb = translate(b, 1.5, -0.7);
    inv = std::max({inv, rel(rat(ra, rb), wr), rel(reg(ra, rb), wg), rel(rat(ta, tb), wr), rel(reg(ta, tb), wg)});
    const double lin = w_lin_oracle(a, b, kWeighted, M);
    const double bar = barW_oracle(a, b, kWeighted, M);
    order = std::max({order, (lin - bar) / bar, (bar - wr) / wr, (lin - wg) / wg});

    for (const EnergyKind& kind : {EnergyKind::rat(), EnergyKind::reg(eps)}) {
      const auto f = [&](const FourierCurve& x, const FourierCurve& y) {
        return kind.is_rat() ? rat(x, y) : reg(x, y);
      };
      const EnergyGradient g = w_grad(a, b, kWeighted, kind, M);
      const FourierCurve e = random_field(N, rng);
      const FourierCurve gh = g.d_hat, gc = g.d_check;
      // Along the gradient itself, relative to the directional derivative.
      const double fd_g = (f(a + h * gh, b) - f(a - h * gh, b)) / (2 * h);
      grad = std::max(grad, rel(fd_g, gh.coeffs().squaredNorm()));
      const double fd_c = (f(a, b + h * gc) - f(a, b - h * gc)) / (2 * h);
      grad = std::max(grad, rel(fd_c, gc.coeffs().squaredNorm()));
      // Along a random direction, relative to |grad|·|e|.
      const double fd_e = (f(a, b + h * e) - f(a, b - h * e)) / (2 * h);
      grad = std::max(grad, std::abs(fd_e - gc.coeffs().dot(e.coeffs())) / (gc.coeffs().norm() * e.coeffs().norm()));
    }
  }
  const bool ok = diag <= 1e-14 && sym <= 1e-12 && inv <= 1e-11 && order <= 1e-10 && grad <= 1e-5;
  return {ok, fmt("W[c,c] %.1e, symmetry %.1e, invariance %.1e, ordering violation %.1e, gradient %.1e", diag, sym,
                  inv, std::max(order, 0.0), grad)};
}

// 9. Exp/Log inverse consistency and the O(|v|²) bound on 100 random (c0, v).
Outcome exp_log_consistency() {
  std::mt19937 rng(99);
  const int N = 8, M = 40;
  SolverOptions opts;
  const double tol = opts.fixed_point_tol;
  double round_trip = 0, spread = 1;
  for (int trial = 0; trial < 100; ++trial) {
    const FourierCurve c0 = perturbed_circle(N, rng, 0.3);
    FourierCurve dir = random_field(N, rng);
    dir = (1.0 / sobolev_norm(dir, 2)) * dir;
    const EnergyModel model(kWeighted, trial % 2 ? EnergyKind::reg(0.1) : EnergyKind::rat(), N, M);
    std::vector<double> ratio;
    for (double s : {1e-1, 1e-2, 1e-3}) {
      const FourierCurve v = s * dir;
      const FourierCurve c2 = exp2(c0, v, model, opts);
      round_trip = std::max(round_trip, sobolev_norm(log2(c0, c2, model, opts) - v, 2) / s);
      ratio.push_back(sobolev_norm(c2 - c0 - v, 2) / (s * s));
    }
    spread = std::max(spread, *std::max_element(ratio.begin(), ratio.end()) /
                                  *std::min_element(ratio.begin(), ratio.end()));
  }
  return {round_trip <= 10 * tol && spread <= 4,
          fmt("max |log2(exp2 v) - v|/|v| = %.1e (need <= %.0e), max/min of |exp2 - c0 - v|/|v|^2 over s: %.3f "
              "(need <= 4)",
              round_trip, 10 * tol, spread)};
}

// 10. Inner-product drift along a Rat geodesic and Reg ε = τ transport convergence.
Outcome transport_diagnostics() {
  std::string drift_msg;
  bool drift_ok;
  {
    const int N = 40, K = 256;
    const EnergyModel rat(kWeighted, EnergyKind::rat(), N, 4 * N);
    SolverOptions opts;
    opts.multilevel = true;
    const DiscretePath geo = solve_bvp(circle_curve(N), star_curve(N), K, rat, opts);
    const std::vector<FourierCurve> ws = transport_path_all(geo, circle_normal_mode(N, 5), rat);
    const std::vector<double> alpha = transport_inner_products(geo, ws, rat);
    std::vector<double> d;
    for (size_t k = 0; k + 1 < alpha.size(); ++k) d.push_back(std::abs(K * (alpha[k + 1] - alpha[k])));
    std::vector<double> sorted = d;
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
    const double median = sorted[sorted.size() / 2];
    const double mx = *std::max_element(d.begin(), d.end());
    const size_t q = d.size() / 4;
    const double first = std::accumulate(d.begin(), d.begin() + q, 0.0) / q;
    const double last = std::accumulate(d.end() - q, d.end(), 0.0) / q;
    drift_ok = mx < 10 * median && last <= 2 * first;
    drift_msg = fmt("drift max/median %.2f (need < 10), last/first quarter %.2f (need <= 2)", mx / median,
                    last / first);
    progress(drift_msg);
  }
  const int N = 20;
  SweepSetup s;
  s.weights = kWeighted;
  s.N = N;
  s.M = 4 * N;
  s.Ks = {8, 16, 32, 64, 128, 256};
  const FourierCurve a = circle_curve(N), b = star_curve(N), w0 = circle_normal_mode(N, 5);
  const DiscretePath fine = reference_geodesic(a, b, 8192, s);
  const FourierCurve ref = transport_path(fine, w0, EnergyModel(kWeighted, EnergyKind::rat(), N, 4 * N));
  progress("reference done");
  s.kind = KindRule::make_reg(EpsilonRule::parse("tau"));
  const SweepTable t = sweep_transport(s, fine, w0, ref);
  log_table(t);
  const double slope = t.slope(1);
  return {drift_ok && std::abs(slope - 1.0) <= 0.3,
          drift_msg + fmt("; transport slope eps=tau over K=32..256: %.3f (1.0+-0.3)", slope)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"closed-form time integrals vs quadrature", closed_forms},
      {"circle sectional curvature golden value", circle_curvature},
      {"Christoffel golden values", christoffel_golden},
      {"discrete curvature convergence (Rat, central)", curvature_convergence},
      {"covariant derivative convergence (Reg, one-sided)", covderiv_convergence},
      {"exponential map convergence", exp_convergence},
      {"geodesic BVP self-convergence", bvp_convergence},
      {"energy property suite", energy_properties},
      {"exp/log inverse consistency", exp_log_consistency},
      {"transport diagnostics", transport_diagnostics},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::stoi(argv[i]));

  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    std::fprintf(stderr, "[%d] %s\n", id, criteria[i].first);
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %d %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first, o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
