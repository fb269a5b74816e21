#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "cfit/partition.hpp"

namespace cfit {

using SparseMatrix = Eigen::SparseMatrix<double>;

enum class Spectrum { Smallest, Largest };

// Eigenpairs ordered from the requested end of the spectrum; vectors are
// stored column-wise.
struct EigenPairs {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

// Dense problems below this order use a direct solver; larger ones use the
// Lanczos iteration.
inline constexpr Eigen::Index kDenseEigenLimit = 500;

struct LanczosOptions {
  double tolerance = 1e-8;
  std::uint64_t seed = 0x5eed;
  int max_restarts = 200;
};

// Symmetric Lanczos with full reorthogonalization, explicit restarts and
// locking of converged pairs (so repeated eigenvalues are found).
//
// Collects up to `max_count` eigenpairs from the `which` end. When `stop` is
// given, collection ends right after the first locked eigenvalue for which it
// returns true (that value is included).
EigenPairs lanczos_extreme(const SparseMatrix& a, std::size_t max_count, Spectrum which,
                           const std::function<bool(double)>& stop = {},
                           const LanczosOptions& opts = {});

// Same contract, solved through a dense decomposition.
EigenPairs dense_extreme(const Eigen::MatrixXd& a, std::size_t max_count, Spectrum which,
                         const std::function<bool(double)>& stop = {});

// Chooses the dense or the Lanczos path by matrix order.
EigenPairs symmetric_extreme(const SparseMatrix& a, std::size_t max_count, Spectrum which,
                             const std::function<bool(double)>& stop = {},
                             const LanczosOptions& opts = {});

struct KMeansResult {
  std::vector<Label> labels;
  double inertia = 0.0;
  int best_restart = 0;
};

// Lloyd's algorithm with k-means++ seeding. The restart with the lowest
// inertia wins; ties go to the earliest restart.
KMeansResult kmeans(const Eigen::MatrixXd& rows, std::size_t k, int restarts, std::uint64_t seed);

}  // namespace cfit
