#include "cfit/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "cfit/error.hpp"

namespace cfit {

SparseMatrix adjacency_matrix(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.node_count());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(2 * g.edge_count());
  for (const auto& e : g.edges()) {
    trip.emplace_back(e.u, e.v, 1.0);
    trip.emplace_back(e.v, e.u, 1.0);
  }
  SparseMatrix a(n, n);
  a.setFromTriplets(trip.begin(), trip.end());
  return a;
}

double mean_excess_degree(const Graph& g) {
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    const auto d = static_cast<double>(g.degree(static_cast<NodeId>(i)));
    sum += d;
    sum_sq += d * d;
  }
  return sum > 0.0 ? sum_sq / sum - 1.0 : 0.0;
}

SparseMatrix bethe_hessian(const Graph& g, double r) {
  const auto n = static_cast<Eigen::Index>(g.node_count());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(2 * g.edge_count() + g.node_count());
  for (const auto& e : g.edges()) {
    trip.emplace_back(e.u, e.v, -r);
    trip.emplace_back(e.v, e.u, -r);
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    trip.emplace_back(i, i, r * r - 1.0 + static_cast<double>(g.degree(static_cast<NodeId>(i))));
  }
  SparseMatrix h(n, n);
  h.setFromTriplets(trip.begin(), trip.end());
  return h;
}

namespace {

void apply_cap(SpectralSelection& sel, std::size_t k_cap) {
  if (sel.k > k_cap) {
    sel.warnings.push_back("spectral k=" + std::to_string(sel.k) + " capped at " +
                           std::to_string(k_cap));
    sel.k = k_cap;
  }
}

SpectralSelection trivial_selection(const Graph& g) {
  SpectralSelection sel;
  const auto n = static_cast<Eigen::Index>(g.node_count());
  sel.k = 1;
  sel.embedding = Eigen::MatrixXd::Constant(n, 1, 1.0 / std::sqrt(static_cast<double>(n)));
  return sel;
}

}  // namespace

SpectralSelection bethe_hessian_select(const Graph& g, std::size_t k_cap) {
  if (g.node_count() < 2) throw InvalidArgument("Bethe Hessian selection needs N >= 2");
  const double c = mean_excess_degree(g);
  if (c <= 0.0) {
    auto sel = trivial_selection(g);
    sel.warnings.push_back("mean excess degree <= 0; using k = 1");
    return sel;
  }
  const double r = std::sqrt(c);
  const auto h = bethe_hessian(g, r);
  const std::size_t limit = std::min<std::size_t>(g.node_count(), k_cap == SIZE_MAX ? k_cap : k_cap + 1);
  auto pairs = symmetric_extreme(h, limit, Spectrum::Smallest, [](double x) { return x >= 0.0; });

  SpectralSelection sel;
  sel.parameter = r;
  sel.eigenvalues = pairs.values;
  std::size_t negatives = 0;
  while (negatives < static_cast<std::size_t>(pairs.values.size()) && pairs.values[negatives] < 0.0) {
    ++negatives;
  }
  sel.k = std::max<std::size_t>(1, negatives);
  apply_cap(sel, k_cap);
  sel.embedding = pairs.vectors.leftCols(static_cast<Eigen::Index>(sel.k));
  return sel;
}

Eigen::MatrixXd nonbacktracking_companion(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.node_count());
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (const auto& e : g.edges()) {
    b(e.u, e.v) = 1.0;
    b(e.v, e.u) = 1.0;
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    b(i, n + i) = 1.0 - static_cast<double>(g.degree(static_cast<NodeId>(i)));
    b(n + i, i) = 1.0;
  }
  return b;
}

SpectralSelection nonbacktracking_select(const Graph& g, std::size_t k_cap) {
  if (g.node_count() < 2) throw InvalidArgument("non-backtracking selection needs N >= 2");
  if (g.node_count() > kMaxCompanionNodes) {
    throw SolverError("non-backtracking spectrum: " + std::to_string(g.node_count()) +
                      " nodes exceeds the dense solver limit");
  }
  const auto n = static_cast<Eigen::Index>(g.node_count());
  Eigen::EigenSolver<Eigen::MatrixXd> solver(nonbacktracking_companion(g), true);
  if (solver.info() != Eigen::Success) throw SolverError("non-backtracking eigensolver failed");

  const auto& values = solver.eigenvalues();
  std::vector<Eigen::Index> real_idx;
  for (Eigen::Index t = 0; t < values.size(); ++t) {
    if (std::abs(values[t].imag()) < kRealEigenTolerance) real_idx.push_back(t);
  }
  if (real_idx.empty()) throw SolverError("companion matrix has no real eigenvalue");
  std::stable_sort(real_idx.begin(), real_idx.end(),
                   [&](auto a, auto b) { return values[a].real() > values[b].real(); });

  SpectralSelection sel;
  const double lambda1 = values[real_idx.front()].real();
  sel.parameter = lambda1;
  const double threshold = std::sqrt(std::max(lambda1, 0.0)) + kRealEigenTolerance;
  std::vector<Eigen::Index> outside;
  for (auto t : real_idx) {
    if (values[t].real() > threshold) outside.push_back(t);
  }
  sel.k = std::max<std::size_t>(1, outside.size());
  apply_cap(sel, k_cap);
  if (outside.empty()) outside.push_back(real_idx.front());

  const auto k = static_cast<Eigen::Index>(sel.k);
  sel.embedding.resize(n, k);
  sel.eigenvalues.resize(k);
  for (Eigen::Index c = 0; c < k; ++c) {
    const auto t = outside[c];
    sel.eigenvalues[c] = values[t].real();
    Eigen::VectorXd vec = solver.eigenvectors().col(t).head(n).real();
    const double norm = vec.norm();
    sel.embedding.col(c) = norm > 0.0 ? Eigen::VectorXd(vec / norm) : vec;
  }
  return sel;
}

EigenPairs adjacency_top_eigenpairs(const Graph& g, std::size_t k) {
  return symmetric_extreme(adjacency_matrix(g), k, Spectrum::Largest);
}

}  // namespace cfit
