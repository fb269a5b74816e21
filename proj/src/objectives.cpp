#include "cfit/objectives.hpp"

#include <map>
#include <vector>

#include "cfit/error.hpp"

namespace cfit {

using detail::plogp2;
using detail::xlogx;

double mdl_penalty(std::size_t k, std::size_t nodes, std::size_t edges) {
  const double kk = static_cast<double>(k);
  const double log_m = edges > 0 ? std::log(static_cast<double>(edges)) : 0.0;
  return kk * (kk + 1.0) / 2.0 * log_m + static_cast<double>(nodes) * std::log(kk);
}

namespace detail {

double description_length_from(const BlockStats& s, std::size_t nodes, std::size_t edges,
                               BlockModel model) {
  double nll = 0.0;
  if (model == BlockModel::SBM) {
    for (std::size_t r = 0; r < s.k; ++r) {
      for (std::size_t t = r; t < s.k; ++t) {
        nll += sbm_pair_nll(static_cast<double>(s.e(r, t)), static_cast<double>(s.capacity(r, t)));
      }
    }
  } else {
    for (auto d : s.node_degrees) nll -= xlogx(static_cast<double>(d));
    for (auto d : s.degrees) nll += xlogx(static_cast<double>(d));
    for (std::size_t r = 0; r < s.k; ++r) {
      for (std::size_t t = r; t < s.k; ++t) {
        nll += dcsbm_pair_nll(static_cast<double>(s.e(r, t)), r == t);
      }
    }
    nll += static_cast<double>(edges);
  }
  return nll + mdl_penalty(s.k, nodes, edges);
}

double neg_log_evidence_from(const BlockStats& s, std::size_t nodes) {
  double nlz = 0.0;
  for (std::size_t r = 0; r < s.k; ++r) {
    for (std::size_t t = r; t < s.k; ++t) {
      nlz += beta_pair_nlz(static_cast<double>(s.e(r, t)), static_cast<double>(s.capacity(r, t)));
    }
  }
  const double n = static_cast<double>(nodes);
  return nlz + std::log(n) + n * std::log(static_cast<double>(s.k));
}

double modularity_from(const BlockStats& s, std::size_t edges) {
  if (edges == 0) return 0.0;
  const double m = static_cast<double>(edges);
  double q = 0.0;
  for (std::size_t r = 0; r < s.k; ++r) {
    const double frac = static_cast<double>(s.degrees[r]) / (2.0 * m);
    q += static_cast<double>(s.e(r, r)) / m - frac * frac;
  }
  return q;
}

double map_equation_unchecked(const Graph& g, const Partition& p) {
  if (p.size() != g.node_count()) throw InvalidArgument("partition does not cover the graph");
  const auto m_total = static_cast<double>(g.edge_count());
  if (m_total == 0.0) return 0.0;

  std::size_t comp_count = 0;
  const auto comp = connected_components(g, &comp_count);

  struct Module {
    double volume = 0.0;
    double cut = 0.0;
  };
  // (component, label) -> module stats; ordered so evaluation order is fixed
  std::map<std::pair<NodeId, Label>, Module> modules;
  std::vector<double> comp_edges(comp_count, 0.0);
  std::vector<double> comp_node_entropy(comp_count, 0.0);  // sum d log2 d

  for (std::size_t i = 0; i < g.node_count(); ++i) {
    const auto d = static_cast<double>(g.degree(static_cast<NodeId>(i)));
    modules[{comp[i], p[i]}].volume += d;
    comp_node_entropy[comp[i]] += plogp2(d);
  }
  for (const auto& e : g.edges()) {
    comp_edges[comp[e.u]] += 1.0;
    if (p[e.u] != p[e.v]) {
      modules[{comp[e.u], p[e.u]}].cut += 1.0;
      modules[{comp[e.v], p[e.v]}].cut += 1.0;
    }
  }

  std::vector<double> exit_total(comp_count, 0.0), exit_terms(comp_count, 0.0),
      module_terms(comp_count, 0.0);
  for (const auto& [key, mod] : modules) {
    const auto c = key.first;
    const double w = 2.0 * comp_edges[c];
    if (w == 0.0) continue;
    const double q = mod.cut / w;
    exit_total[c] += q;
    exit_terms[c] += plogp2(q);
    module_terms[c] += plogp2(q + mod.volume / w);
  }

  double total = 0.0;
  for (std::size_t c = 0; c < comp_count; ++c) {
    if (comp_edges[c] == 0.0) continue;
    const double w = 2.0 * comp_edges[c];
    // sum_i plogp(d_i / w) = (sum d log d)/w - log w
    const double node_terms = comp_node_entropy[c] / w - std::log2(w);
    const double len = plogp2(exit_total[c]) - 2.0 * exit_terms[c] - node_terms + module_terms[c];
    total += comp_edges[c] / m_total * len;
  }
  return total;
}

}  // namespace detail

double modularity(const Graph& g, const Partition& p) {
  if (g.edge_count() == 0) throw UndefinedObjective("modularity is undefined for M = 0");
  return detail::modularity_from(block_stats(g, p), g.edge_count());
}

double description_length(const Graph& g, const Partition& p, BlockModel model) {
  if (g.edge_count() == 0) throw UndefinedObjective("description length needs M >= 1");
  return detail::description_length_from(block_stats(g, p), g.node_count(), g.edge_count(), model);
}

double bayes_evidence(const Graph& g, const Partition& p) {
  if (g.edge_count() == 0) throw UndefinedObjective("evidence needs M >= 1");
  return -detail::neg_log_evidence_from(block_stats(g, p), g.node_count());
}

double map_equation(const Graph& g, const Partition& p) {
  if (g.edge_count() == 0) throw UndefinedObjective("map equation needs M >= 1");
  return detail::map_equation_unchecked(g, p);
}

}  // namespace cfit
