#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cfit/graph.hpp"
#include "cfit/linalg.hpp"

namespace cfit {

// Tolerance on the imaginary part for treating a companion-matrix eigenvalue
// as real.
inline constexpr double kRealEigenTolerance = 1e-6;

struct SpectralSelection {
  std::size_t k = 1;
  Eigen::MatrixXd embedding;  // N x k
  Eigen::VectorXd eigenvalues;
  double parameter = 0.0;     // r for the Bethe Hessian, lambda_1 for non-backtracking
  std::vector<std::string> warnings;
};

SparseMatrix adjacency_matrix(const Graph& g);

// Mean excess degree sum(d^2)/sum(d) - 1.
double mean_excess_degree(const Graph& g);

// H(r) = (r^2 - 1) I - r A + D with r = sqrt(mean excess degree).
SparseMatrix bethe_hessian(const Graph& g, double r);

// k = number of strictly negative eigenvalues of H(r) (at least 1); the
// embedding holds the eigenvectors of the k most negative ones. Falls back to
// k = 1 when the mean excess degree is not positive. `k_cap` bounds the count.
SpectralSelection bethe_hessian_select(const Graph& g, std::size_t k_cap = SIZE_MAX);

// 2N x 2N companion [[A, I - D], [I, 0]] of the non-backtracking operator.
Eigen::MatrixXd nonbacktracking_companion(const Graph& g);

// k = number of real eigenvalues above sqrt(lambda_1) + kRealEigenTolerance,
// where lambda_1 is the largest real eigenvalue. Dense solve; throws
// SolverError when the eigensolver fails or the graph exceeds kMaxCompanionNodes.
inline constexpr std::size_t kMaxCompanionNodes = 2000;
SpectralSelection nonbacktracking_select(const Graph& g, std::size_t k_cap = SIZE_MAX);

// Top-k eigenpairs of the adjacency matrix (largest algebraic eigenvalues).
EigenPairs adjacency_top_eigenpairs(const Graph& g, std::size_t k);

}  // namespace cfit
