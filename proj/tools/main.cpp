// Command-line driver for discrete geodesic calculus on Sobolev curves.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "sobcurve/errors.hpp"
#include "sobcurve/experiments.hpp"
#include "sobcurve/oracle.hpp"
#include "sobcurve/shapes.hpp"

using namespace sobcurve;

namespace {

struct Config {
  std::string kind = "rat";
  std::string epsilon = "1/K";
  std::string weights;
  int m = 0;
  int K = 8;
  std::vector<int> K_list;
  int N = 20;
  int M = 0;
  std::optional<double> beta;
  std::string eps_in, eps_out;
  double C = 1.0;
  bool centered = false;
  bool one_sided = false;
  double tol = 0;
  int max_iters = 0;
  std::string in_a, in_b, in_v, in_w;
  std::string out;
  std::string ref;
};

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t pos = 0;
      out.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidArgument, "bad list entry '" + item + "'");
    }
  }
  return out;
}

MetricWeights weights_of(const Config& c, const std::vector<double>& fallback) {
  MetricWeights w = c.weights.empty() ? (c.m > 0 ? MetricWeights::unit(c.m) : MetricWeights(fallback))
                                      : MetricWeights(parse_list(c.weights));
  if (c.m > 0 && c.m != w.m) throw Error(ErrorCode::InvalidArgument, "--m disagrees with the number of weights");
  return w;
}

KindRule kind_of(const Config& c) {
  if (c.kind == "rat") return KindRule::make_rat();
  if (c.kind == "reg") return KindRule::make_reg(EpsilonRule::parse(c.epsilon));
  throw Error(ErrorCode::InvalidArgument, "--kind must be reg or rat");
}

int M_of(const Config& c) {
  const int M = c.M > 0 ? c.M : 4 * c.N;
  if (M <= 2 * c.N) throw Error(ErrorCode::InvalidArgument, "M must exceed 2N");
  return M;
}

SolverOptions solver_of(const Config& c) {
  SolverOptions o;
  if (c.tol > 0) o.grad_tol = o.fixed_point_tol = c.tol;
  if (c.max_iters > 0) o.max_iters = o.fixed_point_max_iters = c.max_iters;
  return o;
}

// (x·cos θ, y·sin θ) when cross = false, (x·cos θ, y·cos θ) otherwise.
FourierCurve first_mode_field(double x, double y, bool cross, int N) {
  FourierCurve f(2, N);
  f.matrix()(1, 0) = x;
  f.matrix()(cross ? 1 : 2, 1) = y;
  return f;
}

// A curve file, "shape:<circle|ellipse|star>" or a named field:
// field:normal<k>, field:rot-tangent (of the base), field:exp-v (−cos/2, sin),
// field:cov-w (cos, sin/2), field:e1cos (cos, 0), field:e2cos (0, cos).
FourierCurve resolve(const std::string& source, int N, const FourierCurve* base = nullptr) {
  auto fit = [&](const FourierCurve& c) { return c.order() >= N ? truncate(c, N) : pad(c, N); };
  if (source.rfind("shape:", 0) == 0) return named_shape(source.substr(6), N);
  if (source.rfind("field:", 0) == 0) {
    const std::string name = source.substr(6);
    if (name.rfind("normal", 0) == 0) return circle_normal_mode(N, std::stoi(name.substr(6)));
    if (name == "rot-tangent") {
      if (!base) throw Error(ErrorCode::InvalidArgument, "field:rot-tangent needs a base curve");
      return rotated_tangent(*base);
    }
    if (name == "exp-v") return first_mode_field(-0.5, 1.0, false, N);
    if (name == "cov-w") return first_mode_field(1.0, 0.5, false, N);
    if (name == "e1cos") return first_mode_field(1.0, 0.0, true, N);
    if (name == "e2cos") return first_mode_field(0.0, 1.0, true, N);
    throw Error(ErrorCode::InvalidArgument, "unknown field '" + name + "'");
  }
  return fit(read_curve(source));
}

std::string config_json(const std::string& command, const Config& c, const MetricWeights& w) {
  nlohmann::json j;
  j["command"] = command;
  j["kind"] = kind_of(c).str();
  j["weights"] = w.a;
  j["N"] = c.N;
  j["M"] = M_of(c);
  if (!c.K_list.empty()) j["K_list"] = c.K_list;
  else j["K"] = c.K;
  if (!c.ref.empty()) j["ref"] = c.ref;
  for (auto [k, v] : {std::pair{"in_a", c.in_a}, {"in_b", c.in_b}, {"in_v", c.in_v}, {"in_w", c.in_w}})
    if (!v.empty()) j[k] = v;
  if (c.beta) j["beta"] = *c.beta;
  if (!c.eps_in.empty()) j["eps_in"] = c.eps_in;
  if (!c.eps_out.empty()) j["eps_out"] = c.eps_out;
  if (command == "sweep-curvature" || command == "curvature") j["C"] = c.C;
  if (c.centered) j["centered"] = true;
  if (c.tol > 0) j["tol"] = c.tol;
  if (c.max_iters > 0) j["max_iters"] = c.max_iters;
  return j.dump();
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10e", v);
  return buf;
}

// CSV with a config comment, a header, rows as they finish and slope comments.
class CsvOut {
 public:
  explicit CsvOut(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw Error(ErrorCode::Io, "cannot write " + path);
    }
  }
  std::ostream& os() { return file_ ? *file_ : std::cout; }
  void begin(const std::string& config, const std::vector<std::string>& cols) {
    os() << "# config: " << config << "\n";
    for (size_t i = 0; i < cols.size(); ++i) os() << (i ? "," : "") << cols[i];
    os() << "\n" << std::flush;
  }
  void row(const std::vector<double>& r) {
    os() << static_cast<long>(r[0]);
    for (size_t i = 1; i < r.size(); ++i) os() << "," << num(r[i]);
    os() << "\n" << std::flush;
  }
  void slopes(const SweepTable& t, size_t first_err_col) {
    for (size_t j = first_err_col; j < t.columns.size(); ++j) {
      const double s = t.rows.size() >= 2 ? t.slope(j) : 0.0;
      os() << "# slope_" << t.columns[j] << "=" << num(s) << "\n";
      std::cerr << "slope " << t.columns[j] << " = " << num(s) << "\n";
    }
    os() << std::flush;
  }

 private:
  std::unique_ptr<std::ofstream> file_;
};

std::vector<int> k_list_of(const Config& c) {
  if (c.K_list.empty()) throw Error(ErrorCode::InvalidArgument, "sweeps need --K-list");
  return c.K_list;
}

// "self:K" or a file; returns K for self references.
std::optional<int> self_ref(const std::string& ref, int fallback) {
  if (ref.empty()) return fallback;
  if (ref.rfind("self:", 0) == 0) {
    const int K = std::stoi(ref.substr(5));
    if (K < 1) throw Error(ErrorCode::InvalidArgument, "reference K must be >= 1");
    return K;
  }
  return std::nullopt;
}

void emit_curve(const Config& c, const FourierCurve& f) {
  if (c.out.empty()) std::cout << curve_to_json(f) << "\n";
  else write_curve(c.out, f);
}

int run(const std::string& cmd, const Config& c) {
  const bool unit_weights = cmd == "curvature" || cmd == "sweep-curvature";
  const MetricWeights w = weights_of(c, unit_weights ? std::vector<double>{1, 1, 1} : std::vector<double>{1e-4, 1, 1e-2});
  const int N = c.N, M = M_of(c);
  const KindRule kr = kind_of(c);
  const SolverOptions opts = solver_of(c);
  if (c.K < 1) throw Error(ErrorCode::InvalidArgument, "K must be >= 1");
  const EnergyModel model(w, kr.at(c.K), N, M);

  if (cmd == "geodesic") {
    const FourierCurve a = resolve(c.in_a.empty() ? "shape:circle" : c.in_a, N);
    const FourierCurve b = resolve(c.in_b.empty() ? "shape:star" : c.in_b, N);
    BvpReport rep;
    const DiscretePath p = solve_bvp(a, b, c.K, model, opts, &rep);
    if (!c.out.empty()) write_path(c.out, p);
    std::cout << "energy=" << num(rep.energy) << " iterations=" << rep.iterations
              << " grad_norm=" << num(rep.grad_norm) << "\n";
    return 0;
  }
  if (cmd == "exp") {
    const FourierCurve a = resolve(c.in_a.empty() ? "shape:circle" : c.in_a, N);
    const FourierCurve v = resolve(c.in_v.empty() ? "field:exp-v" : c.in_v, N, &a);
    const DiscretePath p = exp_k(a, v, c.K, model, opts);
    emit_curve(c, p.curves.back());
    std::cerr << "min_speed=" << num(min_speed(p.curves.back(), M)) << "\n";
    return 0;
  }
  if (cmd == "log") {
    const FourierCurve a = resolve(c.in_a.empty() ? "shape:circle" : c.in_a, N);
    const FourierCurve b = resolve(c.in_b.empty() ? "shape:star" : c.in_b, N);
    FourierCurve v;
    if (c.K == 2) {
      v = log2(a, b, model, opts);
    } else {
      const DiscretePath p = solve_bvp(a, b, c.K, model, opts);
      v = static_cast<double>(c.K) * (p[1] - p[0]);
    }
    emit_curve(c, v);
    std::cerr << "g_norm=" << num(std::sqrt(model.metric().eval(a, v, v))) << "\n";
    return 0;
  }
  if (cmd == "transport") {
    const FourierCurve a = resolve(c.in_a.empty() ? "shape:circle" : c.in_a, N);
    const FourierCurve b = resolve(c.in_b.empty() ? "shape:star" : c.in_b, N);
    const FourierCurve w0 = resolve(c.in_w.empty() ? "field:normal5" : c.in_w, N, &a);
    const DiscretePath p = solve_bvp(a, b, c.K, EnergyModel(w, EnergyKind::rat(), N, M), opts);
    const std::vector<FourierCurve> ws = transport_path_all(p, w0, model, opts);
    emit_curve(c, ws.back());
    const std::vector<double> alpha = transport_inner_products(p, ws, model);
    std::cerr << "alpha_first=" << num(alpha.front()) << " alpha_last=" << num(alpha.back()) << "\n";
    return 0;
  }
  if (cmd == "covderiv") {
    const FourierCurve a = resolve(c.in_a.empty() ? "shape:circle" : c.in_a, N);
    const FourierCurve v = resolve(c.in_v.empty() ? "field:exp-v" : c.in_v, N, &a);
    const FourierCurve wf = resolve(c.in_w.empty() ? "field:cov-w" : c.in_w, N, &a);
    const TangentField field = [&](const FourierCurve&) { return wf; };
    emit_curve(c, cov_deriv(a, v, field, 1.0 / c.K, model, opts, c.centered));
    return 0;
  }
  if (cmd == "curvature") {
    const FourierCurve a = resolve(c.in_a.empty() ? "shape:circle" : c.in_a, N);
    const FourierCurve v = resolve(c.in_v.empty() ? "field:e1cos" : c.in_v, N, &a);
    const FourierCurve wf = resolve(c.in_w.empty() ? "field:e2cos" : c.in_w, N, &a);
    const double tau = 1.0 / c.K;
    CurvatureSchedule s = c.centered ? CurvatureSchedule::central(tau, c.C) : CurvatureSchedule::one_sided(tau);
    if (c.beta) s.beta = *c.beta;
    if (!c.eps_out.empty()) s.eps_out = EpsilonRule::parse(c.eps_out).at(c.K);
    if (!c.eps_in.empty()) s.eps_in = EpsilonRule::parse(c.eps_in).at(c.K);
    const EnergyModel cm(w, kr.rat ? EnergyKind::rat() : EnergyKind::reg(s.eps_out), N, M);
    const double kappa = sectional_curvature(a, v, wf, tau, s, cm, opts);
    std::cout << "kappa=" << num(kappa) << "\n";
    return 0;
  }

  // Sweeps.
  SweepSetup setup;
  setup.weights = w;
  setup.kind = kr;
  setup.N = N;
  setup.M = M;
  setup.Ks = k_list_of(c);
  setup.opts = opts;
  CsvOut csv(c.out);
  const std::string config = config_json(cmd, c, w);
  auto sink = [&](const std::vector<double>& r) { csv.row(r); };
  SweepTable t;
  if (cmd == "sweep-geodesic") {
    const FourierCurve a = resolve(c.in_a.empty() ? "shape:circle" : c.in_a, N);
    const FourierCurve b = resolve(c.in_b.empty() ? "shape:star" : c.in_b, N);
    const auto kref = self_ref(c.ref, 2048);
    const DiscretePath ref = kref ? reference_geodesic(a, b, *kref, setup) : read_path(c.ref);
    csv.begin(config, {"K", "err_L2", "err_W1", "err_W2"});
    t = sweep_geodesic(setup, a, b, ref, sink);
  } else if (cmd == "sweep-exp") {
    const FourierCurve a = resolve(c.in_a.empty() ? "shape:circle" : c.in_a, N);
    const FourierCurve v = resolve(c.in_v.empty() ? "field:exp-v" : c.in_v, N, &a);
    const auto kref = self_ref(c.ref, 8192);
    const FourierCurve ref = kref ? exp_k(a, v, *kref, EnergyModel(w, EnergyKind::rat(), N, M), opts).curves.back()
                                  : resolve(c.ref, N);
    csv.begin(config, {"K", "err_W2"});
    t = sweep_exp(setup, a, v, ref, sink);
  } else if (cmd == "sweep-covderiv") {
    const FourierCurve v = resolve(c.in_v.empty() ? "field:exp-v" : c.in_v, N);
    const FourierCurve wf = resolve(c.in_w.empty() ? "field:cov-w" : c.in_w, N);
    csv.begin(config, {"K", "err_W2"});
    t = sweep_covderiv(setup, v, wf, c.centered, sink);
  } else if (cmd == "sweep-transport") {
    const FourierCurve a = resolve(c.in_a.empty() ? "shape:circle" : c.in_a, N);
    const FourierCurve b = resolve(c.in_b.empty() ? "shape:star" : c.in_b, N);
    const FourierCurve w0 = resolve(c.in_w.empty() ? "field:normal5" : c.in_w, N, &a);
    const auto kref = self_ref(c.ref, 8192);
    const int kfine = kref ? *kref : 8192;
    const DiscretePath fine = reference_geodesic(a, b, kfine, setup);
    const FourierCurve ref = kref ? transport_path(fine, w0, EnergyModel(w, EnergyKind::rat(), N, M), opts)
                                  : resolve(c.ref, N);
    csv.begin(config, {"K", "err_W2"});
    t = sweep_transport(setup, fine, w0, ref, sink);
  } else if (cmd == "sweep-curvature") {
    const FourierCurve v = resolve(c.in_v.empty() ? "field:e1cos" : c.in_v, N);
    const FourierCurve wf = resolve(c.in_w.empty() ? "field:e2cos" : c.in_w, N);
    CurvatureSweepOptions co;
    co.centered = !c.one_sided;
    co.C = c.C;
    co.beta = c.beta;
    if (!c.eps_out.empty()) co.eps_out = EpsilonRule::parse(c.eps_out);
    if (!c.eps_in.empty()) co.eps_in = EpsilonRule::parse(c.eps_in);
    csv.begin(config, {"K", "kappa", "err"});
    t = sweep_curvature(setup, v, wf, co, sink);
    csv.slopes(t, 2);
    return 0;
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown command " + cmd);
  }
  csv.slopes(t, 1);
  return 0;
}

void add_options(CLI::App* sub, Config& c, bool sweep) {
  sub->add_option("--kind", c.kind, "reg or rat")->capture_default_str();
  sub->add_option("--epsilon", c.epsilon, "epsilon value or rule (1/K, 1/sqrtK, c*tau^p)")->capture_default_str();
  sub->add_option("--weights", c.weights, "a0,a1,...,am");
  sub->add_option("--m", c.m, "metric order (unit weights if --weights is absent)");
  sub->add_option("-N", c.N, "Fourier order")->capture_default_str();
  sub->add_option("-M", c.M, "quadrature nodes (default 4N)");
  sub->add_option("--tol", c.tol, "solver tolerance (BVP gradient and Euler-Lagrange steps)");
  sub->add_option("--max-iters", c.max_iters, "solver iteration cap");
  sub->add_option("--in-a", c.in_a, "first curve: file, shape:<name>");
  sub->add_option("--in-b", c.in_b, "second curve");
  sub->add_option("--in-v", c.in_v, "tangent v: file or field:<name>");
  sub->add_option("--in-w", c.in_w, "tangent w: file or field:<name>");
  sub->add_option("--out", c.out, "output file or directory");
  sub->add_option("--beta", c.beta, "inner step exponent");
  sub->add_option("--eps-in", c.eps_in, "inner epsilon rule");
  sub->add_option("--eps-out", c.eps_out, "outer epsilon rule");
  sub->add_option("--C", c.C, "central schedule constant")->capture_default_str();
  if (sweep) {
    sub->add_option("--K-list", c.K_list, "increasing list of K")->delimiter(',');
    sub->add_option("--ref", c.ref, "reference: file or self:K");
    sub->add_flag("--one-sided", c.one_sided, "one-sided curvature quotients");
    sub->add_flag("--centered", c.centered, "central covariant quotients");
  } else {
    sub->add_option("-K", c.K, "time steps (tau = 1/K)")->capture_default_str();
    sub->add_flag("--centered", c.centered, "central quotients");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete geodesic calculus on Sobolev immersed curves"};
  app.require_subcommand(1);
  Config cfg;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"geodesic", "discrete geodesic between two curves"},
      {"exp", "K-step discrete exponential map"},
      {"log", "discrete logarithm (K = 2) or K(c1 - c0) of a discrete geodesic"},
      {"transport", "Schild's ladder transport along a discrete geodesic"},
      {"covderiv", "covariant difference quotient of a constant field"},
      {"curvature", "discrete sectional curvature"},
      {"sweep-geodesic", "BVP self-convergence"},
      {"sweep-exp", "exponential map convergence"},
      {"sweep-covderiv", "covariant derivative vs the circle oracle"},
      {"sweep-transport", "transport convergence"},
      {"sweep-curvature", "sectional curvature vs the circle oracle"}};
  for (const auto& [name, desc] : commands) add_options(app.add_subcommand(name, desc), cfg, name.rfind("sweep-", 0) == 0);
  CLI11_PARSE(app, argc, argv);
  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    return run(cmd, cfg);
  } catch (const Error& e) {
    std::cerr << "error_code=" << error_name(e.code()) << "\n" << e.what() << "\n";
    return 10 + static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error_code=Internal\n" << e.what() << "\n";
    return 2;
  }
}
