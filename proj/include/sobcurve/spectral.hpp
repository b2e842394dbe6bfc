#pragma once

#include <Eigen/Dense>
#include <vector>

namespace sobcurve {

// M×(2N+1) matrix whose column p holds the j-th derivative of basis
// function p (row convention of FourierCurve) at the nodes 2πi/M.
Eigen::MatrixXd evaluation_matrix(int N, int M, int j);

// Grid → modes ≤ ⌊(M−1)/2⌋ → exact derivative → grid, as an M×M matrix.
Eigen::MatrixXd grid_derivative_matrix(int M);

// Evaluation matrices for orders 0..m, shared by energy and metric code.
struct SpectralBasis {
  SpectralBasis(int N, int M, int m);
  int N, M, m;
  std::vector<Eigen::MatrixXd> E;
};

}  // namespace sobcurve
