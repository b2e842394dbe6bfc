#include "sobcurve/spectral.hpp"

#include <cmath>

namespace sobcurve {

namespace {

// cos/sin of 2π·n/M with the argument reduced exactly in integers.
double cos_frac(long n, int M) { return std::cos(2.0 * M_PI * static_cast<double>(((n % M) + M) % M) / M); }
double sin_frac(long n, int M) { return std::sin(2.0 * M_PI * static_cast<double>(((n % M) + M) % M) / M); }

}  // namespace

Eigen::MatrixXd evaluation_matrix(int N, int M, int j) {
  Eigen::MatrixXd E = Eigen::MatrixXd::Zero(M, 2 * N + 1);
  if (j == 0) E.col(0).setOnes();
  for (int i = 0; i < M; ++i) {
    for (int k = 1; k <= N; ++k) {
      const double c = cos_frac(static_cast<long>(k) * i, M);
      const double s = sin_frac(static_cast<long>(k) * i, M);
      const double f = std::pow(static_cast<double>(k), j);
      // d^j/dθ^j of cos(kθ), sin(kθ) is k^j cos(kθ + jπ/2), k^j sin(kθ + jπ/2).
      double dc = 0, ds = 0;
      switch (j % 4) {
        case 0: dc = c; ds = s; break;
        case 1: dc = -s; ds = c; break;
        case 2: dc = -c; ds = -s; break;
        case 3: dc = s; ds = -c; break;
      }
      E(i, 2 * k - 1) = f * dc;
      E(i, 2 * k) = f * ds;
    }
  }
  return E;
}

Eigen::MatrixXd grid_derivative_matrix(int M) {
  // Circulant: entry (i, l) depends on l − i only.
  const int K = (M - 1) / 2;
  Eigen::VectorXd col(M);
  for (int n = 0; n < M; ++n) {
    double s = 0;
    for (int k = 1; k <= K; ++k) s += k * sin_frac(static_cast<long>(k) * n, M);
    col(n) = 2.0 * s / M;
  }
  Eigen::MatrixXd D(M, M);
  for (int i = 0; i < M; ++i)
    for (int l = 0; l < M; ++l) D(i, l) = col(((l - i) % M + M) % M);
  return D;
}

SpectralBasis::SpectralBasis(int N_, int M_, int m_) : N(N_), M(M_), m(m_) {
  for (int j = 0; j <= m; ++j) E.push_back(evaluation_matrix(N, M, j));
}

}  // namespace sobcurve
