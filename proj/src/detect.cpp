#include "cfit/detect.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "block_state.hpp"
#include "cfit/error.hpp"
#include "cfit/linalg.hpp"
#include "cfit/objectives.hpp"
#include "cfit/rng.hpp"
#include "cfit/spectral.hpp"
#include "louvain.hpp"

namespace cfit {

namespace {

constexpr std::array<std::string_view, 7> kNames = {
    "Q_LOUVAIN", "MDL_SBM", "MDL_DCSBM", "BAYES_SBM", "MAPEQ", "SPECTRAL_BH", "SPECTRAL_NB",
};

constexpr int kKMeansRestarts = 10;

// Induced subgraph on `nodes` (in the given order).
Graph induced(const Graph& g, const std::vector<NodeId>& nodes) {
  std::vector<NodeId> index(g.node_count(), -1);
  for (std::size_t t = 0; t < nodes.size(); ++t) index[nodes[t]] = static_cast<NodeId>(t);
  std::vector<Edge> edges;
  for (const auto& e : g.edges()) {
    if (index[e.u] >= 0 && index[e.v] >= 0) edges.push_back(make_edge(index[e.u], index[e.v]));
  }
  return Graph(nodes.size(), std::move(edges));
}

Partition run_louvain_q(const Graph& g, std::uint64_t seed, DetectorResult& r) {
  auto out = detail::louvain(g, detail::LocalObjective::Modularity, seed);
  for (std::size_t t = 0; t < out.level_objective.size(); ++t) {
    r.trace.emplace_back(t, out.level_objective[t]);
  }
  return Partition(out.labels);
}

// Map-equation moves inside every component; isolated nodes stay alone.
Partition run_mapeq(const Graph& g, std::uint64_t seed) {
  std::size_t count = 0;
  const auto comp = connected_components(g, &count);
  std::vector<std::vector<NodeId>> members(count);
  for (std::size_t i = 0; i < g.node_count(); ++i) members[comp[i]].push_back(static_cast<NodeId>(i));

  std::vector<Label> labels(g.node_count(), 0);
  Label next = 0;
  for (std::size_t c = 0; c < count; ++c) {
    const auto& nodes = members[c];
    if (nodes.size() == 1) {
      labels[nodes[0]] = next++;
      continue;
    }
    const Graph sub = induced(g, nodes);
    const auto out = detail::louvain(sub, detail::LocalObjective::MapEquation, derive_seed(seed, c));
    Label top = 0;
    for (std::size_t t = 0; t < nodes.size(); ++t) {
      labels[nodes[t]] = next + out.labels[t];
      top = std::max(top, out.labels[t]);
    }
    next += top + 1;
  }
  return Partition(labels);
}

Partition run_block_search(const Graph& g, detail::BlockObjective obj, std::uint64_t seed,
                           DetectorResult& r) {
  auto out = detail::agglomerative_block_search(g, obj, seed);
  r.trace = std::move(out.trace);
  return Partition(out.labels);
}

// Spectral selection on the non-isolated nodes; isolated nodes join the
// cluster whose centroid is nearest to the origin (their embedding is zero).
Partition run_spectral(const Graph& g, bool bethe, std::uint64_t seed, DetectorResult& r) {
  std::vector<NodeId> active;
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    if (g.degree(static_cast<NodeId>(i)) > 0) active.push_back(static_cast<NodeId>(i));
  }
  if (active.size() < 2) throw InvalidArgument("spectral detection needs at least one edge");
  const Graph sub = active.size() == g.node_count() ? g : induced(g, active);
  const std::size_t cap = spectral_k_cap(g);
  SpectralSelection sel = bethe ? bethe_hessian_select(sub, cap) : nonbacktracking_select(sub, cap);
  for (auto& w : sel.warnings) r.warnings.push_back(std::move(w));
  r.trace.emplace_back(sel.k, sel.parameter);

  std::vector<Label> labels(g.node_count(), 0);
  if (sel.k <= 1) {
    r.objective = 0.0;
    return Partition(labels);
  }
  auto km = kmeans(sel.embedding, sel.k, kKMeansRestarts, seed);
  r.objective = km.inertia;

  if (active.size() < g.node_count()) {
    const auto k = static_cast<Eigen::Index>(sel.k);
    Eigen::MatrixXd centroid = Eigen::MatrixXd::Zero(k, sel.embedding.cols());
    std::vector<double> count(sel.k, 0.0);
    for (Eigen::Index t = 0; t < sel.embedding.rows(); ++t) {
      centroid.row(km.labels[t]) += sel.embedding.row(t);
      count[km.labels[t]] += 1.0;
    }
    Label nearest = 0;
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index c = 0; c < k; ++c) {
      if (count[c] == 0.0) continue;
      const double d = (centroid.row(c) / count[c]).squaredNorm();
      if (d < best) {
        best = d;
        nearest = static_cast<Label>(c);
      }
    }
    std::fill(labels.begin(), labels.end(), nearest);
  }
  for (std::size_t t = 0; t < active.size(); ++t) labels[active[t]] = km.labels[t];
  return Partition(labels);
}

}  // namespace

std::string_view method_name(MethodId m) { return kNames[static_cast<std::size_t>(m)]; }

MethodId parse_method(std::string_view name) {
  for (std::size_t t = 0; t < kNames.size(); ++t) {
    if (kNames[t] == name) return static_cast<MethodId>(t);
  }
  std::string known;
  for (auto n : kNames) known += (known.empty() ? "" : ", ") + std::string(n);
  throw InvalidArgument("unknown method '" + std::string(name) + "' (expected one of " + known + ")");
}

std::size_t spectral_k_cap(const Graph& g) {
  const auto root = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(g.edge_count()))));
  return std::max<std::size_t>(1, std::min(g.node_count(), 4 * root));
}

DetectorResult detect(MethodId method, const Graph& g, std::uint64_t seed) {
  if (g.node_count() == 0) throw EmptyGraphError();
  if (g.edge_count() == 0) throw InvalidArgument("detect needs at least one edge");
  DetectorResult r;
  r.method = method;
  r.seed = seed;
  const auto start = std::chrono::steady_clock::now();
  try {
    switch (method) {
      case MethodId::Q_LOUVAIN:
        r.partition = run_louvain_q(g, seed, r);
        r.objective = modularity(g, r.partition);
        break;
      case MethodId::MDL_SBM:
        r.partition = run_block_search(g, detail::BlockObjective::SbmDescriptionLength, seed, r);
        r.objective = description_length(g, r.partition, BlockModel::SBM);
        break;
      case MethodId::MDL_DCSBM:
        r.partition = run_block_search(g, detail::BlockObjective::DcsbmDescriptionLength, seed, r);
        r.objective = description_length(g, r.partition, BlockModel::DCSBM);
        break;
      case MethodId::BAYES_SBM:
        r.partition = run_block_search(g, detail::BlockObjective::NegLogEvidence, seed, r);
        r.objective = bayes_evidence(g, r.partition);
        break;
      case MethodId::MAPEQ:
        r.partition = run_mapeq(g, seed);
        r.objective = map_equation(g, r.partition);
        break;
      case MethodId::SPECTRAL_BH:
      case MethodId::SPECTRAL_NB:
        r.partition = run_spectral(g, method == MethodId::SPECTRAL_BH, seed, r);
        break;
    }
  } catch (const SolverError& e) {
    r.failure = e.what();
    r.partition = Partition(std::vector<Label>(g.node_count(), 0));
    r.objective = 0.0;
  }
  r.k = r.partition.community_count();
  r.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace cfit
