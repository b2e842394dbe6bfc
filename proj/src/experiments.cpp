#include "sobcurve/experiments.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <regex>
#include <sstream>

#include "sobcurve/errors.hpp"
#include "sobcurve/oracle.hpp"
#include "sobcurve/parallel.hpp"
#include "sobcurve/shapes.hpp"

namespace sobcurve {

namespace {

double parse_double(const std::string& s) {
  size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size() || s.empty()) throw Error(ErrorCode::InvalidArgument, "not a number: '" + s + "'");
  return v;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

// Runs one computation per K (in parallel) and hands rows to the sink in K order.
SweepTable run_sweep(const SweepSetup& setup, std::vector<std::string> columns,
                     const std::function<std::vector<double>(int K, const SolverOptions&)>& entry,
                     const RowSink& sink) {
  for (size_t i = 1; i < setup.Ks.size(); ++i)
    if (setup.Ks[i] <= setup.Ks[i - 1]) throw Error(ErrorCode::InvalidArgument, "K list must be strictly increasing");
  for (int K : setup.Ks)
    if (K < 1) throw Error(ErrorCode::InvalidArgument, "K must be >= 1");
  const int n = static_cast<int>(setup.Ks.size());
  const int workers = worker_count(setup.threads);
  SolverOptions opts = setup.opts;
  if (workers > 1) opts.threads = 1;

  SweepTable table;
  table.columns = std::move(columns);
  table.rows.resize(n);
  std::vector<bool> done(n, false);
  int flushed = 0;
  std::mutex mu;
  parallel_for(n, workers, [&](int i) {
    std::vector<double> row = entry(setup.Ks[i], opts);
    row.insert(row.begin(), setup.Ks[i]);
    std::lock_guard<std::mutex> lock(mu);
    table.rows[i] = std::move(row);
    done[i] = true;
    while (flushed < n && done[flushed]) {
      if (sink) sink(table.rows[flushed]);
      ++flushed;
    }
  });
  return table;
}

int stride_of(int K_ref, int K) {
  if (K > K_ref || K_ref % K != 0)
    throw Error(ErrorCode::InvalidArgument,
                "K = " + std::to_string(K) + " does not divide the reference K = " + std::to_string(K_ref));
  return K_ref / K;
}

}  // namespace

EpsilonRule EpsilonRule::parse(const std::string& raw) {
  std::string t;
  for (char ch : raw)
    if (!std::isspace(static_cast<unsigned char>(ch))) t += ch;
  if (t == "1/K" || t == "tau") return {1.0, 1.0};
  if (t == "1/sqrtK" || t == "1/sqrt(K)" || t == "sqrt(tau)") return {1.0, 0.5};
  static const std::regex tau_pow(R"(^(?:([0-9.eE+\-]+)\*)?tau\^\(?([0-9.eE+\-]+)\)?$)");
  static const std::regex k_pow(R"(^(?:([0-9.eE+\-]+)\*)?K\^\(?(-[0-9.eE+\-]+)\)?$)");
  std::smatch m;
  if (std::regex_match(t, m, tau_pow))
    return {m[1].matched ? parse_double(m[1]) : 1.0, parse_double(m[2])};
  if (std::regex_match(t, m, k_pow))
    return {m[1].matched ? parse_double(m[1]) : 1.0, -parse_double(m[2])};
  const double v = parse_double(t);
  if (!(v > 0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
  return fixed(v);
}

double EpsilonRule::at(int K) const { return coef * std::pow(static_cast<double>(K), -power); }

std::string EpsilonRule::str() const {
  if (power == 0) return fmt(coef);
  return (coef == 1.0 ? std::string() : fmt(coef) + "*") + "tau^" + fmt(power);
}

std::vector<double> SweepTable::column(size_t j) const {
  std::vector<double> out;
  for (const auto& r : rows) out.push_back(r.at(j));
  return out;
}

double SweepTable::slope(size_t j) const { return final_half_slope(column(0), column(j)); }

double fitted_slope(const std::vector<double>& K, const std::vector<double>& err) {
  if (K.size() != err.size() || K.size() < 2) throw Error(ErrorCode::InvalidArgument, "slope needs two points");
  const double n = static_cast<double>(K.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < K.size(); ++i) {
    const double x = std::log(K[i]), y = std::log(err[i]);
    sx += x, sy += y, sxx += x * x, sxy += x * y;
  }
  return -(n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double final_half_slope(const std::vector<double>& K, const std::vector<double>& err) {
  const size_t n = K.size();
  const size_t take = std::max<size_t>(2, (n + 1) / 2);
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "slope needs two points");
  return fitted_slope(std::vector<double>(K.end() - take, K.end()), std::vector<double>(err.end() - take, err.end()));
}

std::vector<double> path_errors(const DiscretePath& path, const DiscretePath& ref) {
  const int K = path.K();
  const int stride = stride_of(ref.K(), K);
  std::vector<double> acc(3, 0.0);
  for (int k = 0; k <= K; ++k) {
    const FourierCurve e = path[k] - ref[k * stride];
    for (int r = 0; r < 3; ++r) {
      const double n = sobolev_norm(e, r);
      acc[r] += n * n;
    }
  }
  for (double& a : acc) a = std::sqrt(a / (K + 1));
  return acc;
}

DiscretePath reference_geodesic(const FourierCurve& c_a, const FourierCurve& c_b, int K_ref,
                                const SweepSetup& setup) {
  SolverOptions opts = setup.opts;
  opts.multilevel = true;
  opts.threads = setup.threads;
  const EnergyModel model(setup.weights, EnergyKind::rat(), setup.N, setup.M);
  return solve_bvp(c_a, c_b, K_ref, model, opts);
}

SweepTable sweep_geodesic(const SweepSetup& setup, const FourierCurve& c_a, const FourierCurve& c_b,
                          const DiscretePath& ref, const RowSink& sink) {
  for (int K : setup.Ks) stride_of(ref.K(), K);
  return run_sweep(
      setup, {"K", "err_L2", "err_W1", "err_W2"},
      [&](int K, const SolverOptions& opts) {
        SolverOptions o = opts;
        o.multilevel = true;
        const EnergyModel model(setup.weights, setup.kind.at(K), setup.N, setup.M);
        return path_errors(solve_bvp(c_a, c_b, K, model, o), ref);
      },
      sink);
}

SweepTable sweep_exp(const SweepSetup& setup, const FourierCurve& c0, const FourierCurve& v,
                     const FourierCurve& ref_end, const RowSink& sink) {
  return run_sweep(
      setup, {"K", "err_W2"},
      [&](int K, const SolverOptions& opts) {
        const EnergyModel model(setup.weights, setup.kind.at(K), setup.N, setup.M);
        const FourierCurve end = exp_k(c0, v, K, model, opts).curves.back();
        return std::vector<double>{sobolev_norm(end - ref_end, 2)};
      },
      sink);
}

SweepTable sweep_covderiv(const SweepSetup& setup, const FourierCurve& v, const FourierCurve& w, bool centered,
                          const RowSink& sink) {
  const FourierCurve c = circle_curve(setup.N);
  const FourierCurve exact =
      christoffel_circle(TrigPolynomial::from_curve(w), TrigPolynomial::from_curve(v), setup.weights)
          .to_curve(setup.N);
  const TangentField field = [&](const FourierCurve&) { return w; };
  return run_sweep(
      setup, {"K", "err_W2"},
      [&](int K, const SolverOptions& opts) {
        const EnergyModel model(setup.weights, setup.kind.at(K), setup.N, setup.M);
        const FourierCurve cd = cov_deriv(c, v, field, 1.0 / K, model, opts, centered);
        return std::vector<double>{sobolev_norm(cd - exact, 2)};
      },
      sink);
}

SweepTable sweep_transport(const SweepSetup& setup, const DiscretePath& fine_path, const FourierCurve& w0,
                           const FourierCurve& ref_end, const RowSink& sink) {
  for (int K : setup.Ks) stride_of(fine_path.K(), K);
  return run_sweep(
      setup, {"K", "err_W2"},
      [&](int K, const SolverOptions& opts) {
        const int stride = fine_path.K() / K;
        DiscretePath sub;
        for (int k = 0; k <= K; ++k) sub.curves.push_back(fine_path[k * stride]);
        const EnergyModel model(setup.weights, setup.kind.at(K), setup.N, setup.M);
        return std::vector<double>{sobolev_norm(transport_path(sub, w0, model, opts) - ref_end, 2)};
      },
      sink);
}

SweepTable sweep_curvature(const SweepSetup& setup, const FourierCurve& v, const FourierCurve& w,
                           const CurvatureSweepOptions& copts, const RowSink& sink) {
  const FourierCurve c = circle_curve(setup.N);
  const double exact =
      sectional_curvature_circle(TrigPolynomial::from_curve(v), TrigPolynomial::from_curve(w), setup.weights).kappa;
  return run_sweep(
      setup, {"K", "kappa", "err"},
      [&](int K, const SolverOptions& opts) {
        const double tau = 1.0 / K;
        CurvatureSchedule s =
            copts.centered ? CurvatureSchedule::central(tau, copts.C) : CurvatureSchedule::one_sided(tau);
        if (copts.beta) s.beta = *copts.beta;
        if (copts.eps_out) s.eps_out = copts.eps_out->at(K);
        if (copts.eps_in) s.eps_in = copts.eps_in->at(K);
        // The schedule supplies ε for Reg; any positive placeholder builds the model.
        const EnergyKind kind = setup.kind.rat ? EnergyKind::rat() : EnergyKind::reg(s.eps_out);
        const EnergyModel model(setup.weights, kind, setup.N, setup.M);
        const double kappa = sectional_curvature(c, v, w, tau, s, model, opts);
        return std::vector<double>{kappa, std::abs(kappa - exact)};
      },
      sink);
}

void write_path(const std::string& dir, const DiscretePath& path) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create directory " + dir);
  nlohmann::json manifest;
  manifest["K"] = path.K();
  manifest["nodes"] = nlohmann::json::array();
  for (int k = 0; k <= path.K(); ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "node_%05d.json", k);
    write_curve((fs::path(dir) / name).string(), path[k]);
    manifest["nodes"].push_back(name);
  }
  std::ofstream out(fs::path(dir) / "manifest.json");
  if (!out) throw Error(ErrorCode::Io, "cannot write manifest in " + dir);
  out << manifest.dump(2) << "\n";
}

DiscretePath read_path(const std::string& manifest_path) {
  namespace fs = std::filesystem;
  std::ifstream in(manifest_path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + manifest_path);
  DiscretePath path;
  try {
    const nlohmann::json j = nlohmann::json::parse(in);
    const fs::path base = fs::path(manifest_path).parent_path();
    for (const auto& node : j.at("nodes")) path.curves.push_back(read_curve((base / node.get<std::string>()).string()));
    if (static_cast<int>(path.curves.size()) != j.at("K").get<int>() + 1)
      throw Error(ErrorCode::Io, "manifest K does not match its node count");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Io, std::string("malformed manifest: ") + e.what());
  }
  if (path.curves.size() < 2) throw Error(ErrorCode::Io, "manifest needs at least two nodes");
  return path;
}

}  // namespace sobcurve
