#include "cfit/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cfit/error.hpp"
#include "cfit/rng.hpp"

namespace cfit {

namespace {

// Indices of eigenvalues ordered from the wanted end.
std::vector<Eigen::Index> wanted_order(const Eigen::VectorXd& values, Spectrum which) {
  std::vector<Eigen::Index> idx(values.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) {
    return which == Spectrum::Smallest ? values[a] < values[b] : values[a] > values[b];
  });
  return idx;
}

void orthogonalize(Eigen::VectorXd& w, const Eigen::MatrixXd& basis, Eigen::Index cols) {
  if (cols == 0) return;
  // two passes of classical Gram-Schmidt
  for (int pass = 0; pass < 2; ++pass) {
    Eigen::VectorXd coef = basis.leftCols(cols).transpose() * w;
    w.noalias() -= basis.leftCols(cols) * coef;
  }
}

Eigen::VectorXd random_unit(Eigen::Index n, Rng& rng) {
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = normal(rng);
  return v.normalized();
}

}  // namespace

EigenPairs dense_extreme(const Eigen::MatrixXd& a, std::size_t max_count, Spectrum which,
                         const std::function<bool(double)>& stop) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
  if (solver.info() != Eigen::Success) throw SolverError("dense symmetric eigensolver failed");
  const auto order = wanted_order(solver.eigenvalues(), which);
  std::size_t count = std::min<std::size_t>(max_count, order.size());
  if (stop) {
    for (std::size_t t = 0; t < count; ++t) {
      if (stop(solver.eigenvalues()[order[t]])) {
        count = t + 1;
        break;
      }
    }
  }
  EigenPairs out;
  out.values.resize(static_cast<Eigen::Index>(count));
  out.vectors.resize(a.rows(), static_cast<Eigen::Index>(count));
  for (std::size_t t = 0; t < count; ++t) {
    out.values[t] = solver.eigenvalues()[order[t]];
    out.vectors.col(t) = solver.eigenvectors().col(order[t]);
  }
  return out;
}

EigenPairs lanczos_extreme(const SparseMatrix& a, std::size_t max_count, Spectrum which,
                           const std::function<bool(double)>& stop, const LanczosOptions& opts) {
  const Eigen::Index n = a.rows();
  max_count = std::min<std::size_t>(max_count, static_cast<std::size_t>(n));
  Rng rng(opts.seed);

  Eigen::MatrixXd locked(n, static_cast<Eigen::Index>(max_count));
  std::vector<double> locked_values;
  Eigen::Index basis_size = std::min<Eigen::Index>(n, 40);
  Eigen::VectorXd start = random_unit(n, rng);
  bool done = max_count == 0;
  int restarts = 0;

  while (!done) {
    const auto nlocked = static_cast<Eigen::Index>(locked_values.size());
    const Eigen::Index room = n - nlocked;
    const Eigen::Index m = std::min(basis_size, room);

    Eigen::MatrixXd v(n, m);
    std::vector<double> alpha, beta;  // beta[j] couples v_j and v_{j+1}
    orthogonalize(start, locked, nlocked);
    if (start.norm() < 1e-10) start = random_unit(n, rng), orthogonalize(start, locked, nlocked);
    v.col(0) = start.normalized();
    double last_beta = 0.0;
    Eigen::Index used = 0;
    for (Eigen::Index j = 0; j < m; ++j) {
      Eigen::VectorXd w = a * v.col(j);
      const double aj = v.col(j).dot(w);
      alpha.push_back(aj);
      orthogonalize(w, locked, nlocked);
      orthogonalize(w, v, j + 1);
      double bj = w.norm();
      used = j + 1;
      if (j + 1 == m) {
        last_beta = bj;
        break;
      }
      if (bj < 1e-10) {
        // invariant subspace reached: continue from a fresh orthogonal direction
        Eigen::VectorXd fresh = random_unit(n, rng);
        orthogonalize(fresh, locked, nlocked);
        orthogonalize(fresh, v, j + 1);
        if (fresh.norm() < 1e-10) {
          last_beta = 0.0;
          break;
        }
        w = fresh.normalized();
        bj = 0.0;
      } else {
        w /= bj;
      }
      beta.push_back(bj);
      v.col(j + 1) = w;
    }

    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(used, used);
    for (Eigen::Index j = 0; j < used; ++j) {
      t(j, j) = alpha[j];
      if (j + 1 < used) t(j, j + 1) = t(j + 1, j) = beta[j];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ritz(t);
    const auto order = wanted_order(ritz.eigenvalues(), which);
    const bool exhausted = used == room;

    std::size_t accepted = 0;
    for (auto idx : order) {
      const double theta = ritz.eigenvalues()[idx];
      const double residual = std::abs(last_beta * ritz.eigenvectors()(used - 1, idx));
      if (!exhausted && residual > opts.tolerance * std::max(1.0, std::abs(theta))) break;
      Eigen::VectorXd x = v.leftCols(used) * ritz.eigenvectors().col(idx);
      orthogonalize(x, locked, static_cast<Eigen::Index>(locked_values.size()));
      x.normalize();
      locked.col(static_cast<Eigen::Index>(locked_values.size())) = x;
      locked_values.push_back(theta);
      ++accepted;
      if (locked_values.size() == max_count || (stop && stop(theta))) {
        done = true;
        break;
      }
      // accept only a few per sweep so missed copies of repeated values can surface
      if (accepted >= 4) break;
    }
    if (done) break;
    if (accepted == 0) {
      if (++restarts > opts.max_restarts) throw SolverError("Lanczos did not converge");
      basis_size = std::min<Eigen::Index>(2 * basis_size, n);
      start = v.leftCols(used) * ritz.eigenvectors().col(order.front());
    } else {
      start = random_unit(n, rng);
    }
  }

  EigenPairs out;
  const auto count = static_cast<Eigen::Index>(locked_values.size());
  out.values = Eigen::Map<Eigen::VectorXd>(locked_values.data(), count);
  out.vectors = locked.leftCols(count);
  // locking can interleave equal values; restore wanted order
  const auto order = wanted_order(out.values, which);
  EigenPairs sorted;
  sorted.values.resize(count);
  sorted.vectors.resize(n, count);
  for (Eigen::Index t = 0; t < count; ++t) {
    sorted.values[t] = out.values[order[t]];
    sorted.vectors.col(t) = out.vectors.col(order[t]);
  }
  return sorted;
}

EigenPairs symmetric_extreme(const SparseMatrix& a, std::size_t max_count, Spectrum which,
                             const std::function<bool(double)>& stop, const LanczosOptions& opts) {
  if (a.rows() < kDenseEigenLimit) {
    return dense_extreme(Eigen::MatrixXd(a), max_count, which, stop);
  }
  return lanczos_extreme(a, max_count, which, stop, opts);
}

KMeansResult kmeans(const Eigen::MatrixXd& rows, std::size_t k, int restarts, std::uint64_t seed) {
  const Eigen::Index n = rows.rows();
  if (n == 0) throw InvalidArgument("k-means on an empty point set");
  k = std::clamp<std::size_t>(k, 1, static_cast<std::size_t>(n));
  const auto kk = static_cast<Eigen::Index>(k);

  KMeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();

  for (int run = 0; run < std::max(1, restarts); ++run) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(run)));
    Eigen::MatrixXd centers(kk, rows.cols());
    std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
    centers.row(0) = rows.row(pick(rng));
    Eigen::VectorXd dist2(n);
    for (Eigen::Index i = 0; i < n; ++i) dist2[i] = (rows.row(i) - centers.row(0)).squaredNorm();
    for (Eigen::Index c = 1; c < kk; ++c) {
      const double total = dist2.sum();
      Eigen::Index chosen = pick(rng);
      if (total > 0.0) {
        std::uniform_real_distribution<double> u(0.0, total);
        double target = u(rng), acc = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
          acc += dist2[i];
          if (acc >= target && dist2[i] > 0.0) {
            chosen = i;
            break;
          }
        }
      }
      centers.row(c) = rows.row(chosen);
      for (Eigen::Index i = 0; i < n; ++i) {
        dist2[i] = std::min(dist2[i], (rows.row(i) - centers.row(c)).squaredNorm());
      }
    }

    std::vector<Label> assign(n, -1);
    double inertia = 0.0;
    for (int iter = 0; iter < 300; ++iter) {
      bool changed = false;
      inertia = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        Label bestc = 0;
        double bestd = std::numeric_limits<double>::infinity();
        for (Eigen::Index c = 0; c < kk; ++c) {
          const double d = (rows.row(i) - centers.row(c)).squaredNorm();
          if (d < bestd) bestd = d, bestc = static_cast<Label>(c);
        }
        if (assign[i] != bestc) changed = true;
        assign[i] = bestc;
        dist2[i] = bestd;
        inertia += bestd;
      }
      if (!changed && iter > 0) break;

      Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(kk, rows.cols());
      std::vector<std::size_t> counts(k, 0);
      for (Eigen::Index i = 0; i < n; ++i) {
        sums.row(assign[i]) += rows.row(i);
        ++counts[assign[i]];
      }
      for (Eigen::Index c = 0; c < kk; ++c) {
        if (counts[c] > 0) {
          centers.row(c) = sums.row(c) / static_cast<double>(counts[c]);
        } else {
          // re-seed an empty cluster at the point farthest from its center
          Eigen::Index far = 0;
          dist2.maxCoeff(&far);
          centers.row(c) = rows.row(far);
          dist2[far] = 0.0;
        }
      }
    }
    if (inertia < best.inertia) {
      best.inertia = inertia;
      best.labels = assign;
      best.best_restart = run;
    }
  }
  return best;
}

}  // namespace cfit
