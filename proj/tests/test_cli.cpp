#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "sobcurve/curve.hpp"
#include "sobcurve/experiments.hpp"
#include "sobcurve/shapes.hpp"

namespace {

struct Run {
  int code;
  std::string out;
};

std::string binary() {
  const char* b = std::getenv("SOBCURVE_BIN");
  REQUIRE_MESSAGE(b != nullptr, "SOBCURVE_BIN must point at the CLI");
  return b;
}

// Runs the CLI with stderr discarded, capturing stdout and the exit code.
Run run(const std::string& args) {
  const std::string cmd = binary() + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::string out;
  std::array<char, 4096> buf;
  size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) out.append(buf.data(), n);
  const int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

double field_value(const std::string& out, const std::string& key) {
  const auto pos = out.find(key + "=");
  REQUIRE(pos != std::string::npos);
  return std::stod(out.substr(pos + key.size() + 1));
}

std::string temp(const std::string& name) { return (std::filesystem::temp_directory_path() / name).string(); }

}  // namespace

TEST_CASE("geodesic between identical curves") {
  const Run r = run("geodesic --in-a shape:circle --in-b shape:circle -K 4 -N 4");
  CHECK(r.code == 0);
  CHECK(field_value(r.out, "energy") == 0.0);
  CHECK(field_value(r.out, "iterations") == 0.0);
}

TEST_CASE("geodesic writes a readable path") {
  const std::string dir = temp("sobcurve_cli_path");
  std::filesystem::remove_all(dir);
  const Run r = run("geodesic --in-a shape:circle --in-b shape:ellipse -K 4 -N 4 --out " + dir);
  REQUIRE(r.code == 0);
  CHECK(field_value(r.out, "energy") > 0);
  const sobcurve::DiscretePath p = sobcurve::read_path(dir + "/manifest.json");
  CHECK(p.K() == 4);
  CHECK((p[0].coeffs() - sobcurve::circle_curve(4).coeffs()).norm() == 0.0);
  CHECK((p[4].coeffs() - sobcurve::ellipse_curve(4, 2.0, 1.0).coeffs()).norm() == 0.0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("exp then log through curve files") {
  const std::string end = temp("sobcurve_cli_end.json");
  const Run e = run("exp --in-a shape:circle --in-v field:exp-v -K 2 -N 6 --tol 1e-12 --out " + end);
  REQUIRE(e.code == 0);
  const Run l = run("log --in-a shape:circle --in-b " + end + " -K 2 -N 6 --tol 1e-12 --out " + end + ".v");
  REQUIRE(l.code == 0);
  const sobcurve::FourierCurve v = sobcurve::read_curve(end + ".v");
  sobcurve::FourierCurve expect(2, 6);
  expect.set_cos(1, Eigen::Vector2d(-0.5, 0));
  expect.set_sin(1, Eigen::Vector2d(0, 1));
  CHECK(sobcurve::sobolev_norm(v - expect, 2) < 1e-8);
  std::remove(end.c_str());
  std::remove((end + ".v").c_str());
}

TEST_CASE("sweep CSV layout and determinism") {
  const std::string args = "sweep-curvature --K-list 4,8,16 -N 8";
  const Run a = run(args);
  REQUIRE(a.code == 0);
  const std::vector<std::string> ls = lines(a.out);
  REQUIRE(ls.size() == 6);
  CHECK(ls[0].rfind("# config: {", 0) == 0);
  CHECK(ls[0].find("\"command\":\"sweep-curvature\"") != std::string::npos);
  CHECK(ls[1] == "K,kappa,err");
  CHECK(ls[2].rfind("4,", 0) == 0);
  CHECK(ls[4].rfind("16,", 0) == 0);
  CHECK(ls[5].rfind("# slope_err=", 0) == 0);
  CHECK(field_value(ls[5], "# slope_err") > 1.7);
  CHECK(run(args).out == a.out);
}

TEST_CASE("covariant derivative sweep") {
  const Run r = run("sweep-covderiv --K-list 8,16,32 -N 8 --in-v field:exp-v --in-w field:cov-w");
  REQUIRE(r.code == 0);
  const std::vector<std::string> ls = lines(r.out);
  REQUIRE(ls.size() == 6);
  CHECK(ls[1] == "K,err_W2");
  CHECK(field_value(ls[5], "# slope_err_W2") == doctest::Approx(1.0).epsilon(0.3));
}

TEST_CASE("error exit codes") {
  CHECK(run("curvature --in-v field:e1cos --in-w field:e1cos -N 6").code == 10 + 9);
  CHECK(run("geodesic --in-a /nonexistent/curve.json --in-b shape:circle -N 4").code == 10 + 11);
  CHECK(run("geodesic --in-a shape:circle --in-b shape:circle -K 0 -N 4").code == 10 + 10);
  CHECK(run("sweep-curvature --K-list 8,4 -N 6").code == 10 + 10);
  CHECK(run("no-such-command").code != 0);
}
