// Fixture builders and brute-force oracles shared by the test binaries. The
// oracles work from dense adjacency matrices and explicit pair enumeration so
// they share no code with the library's block-statistics paths.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "cfit/graph.hpp"
#include "cfit/partition.hpp"
#include "cfit/rng.hpp"

namespace cfit::test {

inline Graph make_graph(std::size_t n, const std::vector<std::pair<int, int>>& pairs) {
  std::set<Edge> edges;
  for (auto [a, b] : pairs) edges.insert(make_edge(a, b));
  return Graph(n, {edges.begin(), edges.end()});
}

inline Graph complete(std::size_t n, int offset = 0, std::vector<std::pair<int, int>>* out = nullptr) {
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < static_cast<int>(n); ++i) {
    for (int j = i + 1; j < static_cast<int>(n); ++j) pairs.emplace_back(i + offset, j + offset);
  }
  if (out) out->insert(out->end(), pairs.begin(), pairs.end());
  return make_graph(n + offset, pairs);
}

inline Graph cycle(std::size_t n) {
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < static_cast<int>(n); ++i) pairs.emplace_back(i, (i + 1) % static_cast<int>(n));
  return make_graph(n, pairs);
}

inline Graph star(std::size_t leaves) {
  std::vector<std::pair<int, int>> pairs;
  for (int i = 1; i <= static_cast<int>(leaves); ++i) pairs.emplace_back(0, i);
  return make_graph(leaves + 1, pairs);
}

// Two triangles {0,1,2} and {3,4,5} joined by the bridge 2-3.
inline Graph two_triangles() {
  return make_graph(6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}, {2, 3}});
}

// Disjoint cliques of the given sizes, optionally chained by bridges between
// the last node of one clique and the first node of the next.
inline Graph cliques(const std::vector<int>& sizes, bool bridged) {
  std::vector<std::pair<int, int>> pairs;
  int offset = 0;
  for (std::size_t c = 0; c < sizes.size(); ++c) {
    for (int i = 0; i < sizes[c]; ++i) {
      for (int j = i + 1; j < sizes[c]; ++j) pairs.emplace_back(offset + i, offset + j);
    }
    if (bridged && c + 1 < sizes.size()) pairs.emplace_back(offset + sizes[c] - 1, offset + sizes[c]);
    offset += sizes[c];
  }
  return make_graph(static_cast<std::size_t>(offset), pairs);
}

inline Graph erdos_renyi(std::size_t n, double p, Rng& rng) {
  std::bernoulli_distribution coin(p);
  std::vector<Edge> edges;
  for (NodeId i = 0; i < static_cast<NodeId>(n); ++i) {
    for (NodeId j = i + 1; j < static_cast<NodeId>(n); ++j) {
      if (coin(rng)) edges.push_back({i, j});
    }
  }
  return Graph(n, std::move(edges));
}

// Random graph with at least `min_edges` edges.
inline Graph random_graph(Rng& rng, std::size_t n_lo, std::size_t n_hi, std::size_t min_edges = 1) {
  std::uniform_int_distribution<std::size_t> size(n_lo, n_hi);
  std::uniform_real_distribution<double> dens(0.05, 0.6);
  for (;;) {
    const auto n = size(rng);
    auto g = erdos_renyi(n, dens(rng), rng);
    if (g.edge_count() >= min_edges) return g;
  }
}

inline Partition random_partition(Rng& rng, std::size_t n, std::size_t k_max) {
  std::uniform_int_distribution<std::size_t> kd(1, std::max<std::size_t>(1, std::min(k_max, n)));
  const auto k = kd(rng);
  std::uniform_int_distribution<std::int64_t> lab(0, static_cast<std::int64_t>(k) - 1);
  std::vector<std::int64_t> raw(n);
  for (auto& x : raw) x = lab(rng);
  return Partition(raw);
}

inline std::vector<std::vector<int>> dense(const Graph& g) {
  std::vector<std::vector<int>> a(g.node_count(), std::vector<int>(g.node_count(), 0));
  for (auto e : g.edges()) a[e.u][e.v] = a[e.v][e.u] = 1;
  return a;
}

inline std::vector<int> degrees_of(const std::vector<std::vector<int>>& a) {
  std::vector<int> d(a.size(), 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (int x : a[i]) d[i] += x;
  }
  return d;
}

// Q = (1/2M) sum_ij [A_ij - d_i d_j / 2M] delta(g_i, g_j)
inline double oracle_modularity(const Graph& g, const Partition& p) {
  const auto a = dense(g);
  const auto d = degrees_of(a);
  const double two_m = 2.0 * static_cast<double>(g.edge_count());
  double q = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < a.size(); ++j) {
      if (p[i] == p[j]) q += a[i][j] - d[i] * static_cast<double>(d[j]) / two_m;
    }
  }
  return q / two_m;
}

// Block pair counts (r <= s) by explicit enumeration of node pairs.
struct OracleBlocks {
  std::map<std::pair<int, int>, double> edges, capacity;
  std::vector<double> degree;  // per group
};

inline OracleBlocks oracle_blocks(const Graph& g, const Partition& p) {
  const auto a = dense(g);
  OracleBlocks b;
  const auto k = p.community_count();
  b.degree.assign(k, 0.0);
  for (std::size_t r = 0; r < k; ++r) {
    for (std::size_t s = r; s < k; ++s) {
      b.edges[{static_cast<int>(r), static_cast<int>(s)}] = 0.0;
      b.capacity[{static_cast<int>(r), static_cast<int>(s)}] = 0.0;
    }
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      const int r = std::min(p[i], p[j]), s = std::max(p[i], p[j]);
      b.capacity[{r, s}] += 1.0;
      b.edges[{r, s}] += a[i][j];
    }
    for (std::size_t j = 0; j < a.size(); ++j) b.degree[p[i]] += a[i][j];
  }
  return b;
}

inline double oracle_penalty(double k, double n, double m) {
  return k * (k + 1.0) / 2.0 * std::log(m) + n * std::log(k);
}

// Bernoulli SBM: -sum_{r<=s} [e ln(e/R) + (R-e) ln(1-e/R)] + penalty
inline double oracle_sbm_dl(const Graph& g, const Partition& p) {
  const auto b = oracle_blocks(g, p);
  double nll = 0.0;
  for (const auto& [rs, e] : b.edges) {
    const double cap = b.capacity.at(rs);
    if (cap <= 0.0) continue;
    const double ph = e / cap;
    if (e > 0.0) nll -= e * std::log(ph);
    if (cap - e > 0.0) nll -= (cap - e) * std::log(1.0 - ph);
  }
  return nll + oracle_penalty(static_cast<double>(p.community_count()),
                              static_cast<double>(g.node_count()), static_cast<double>(g.edge_count()));
}

// Poisson degree-corrected SBM with ML parameters, written through the
// per-edge rates: -ln L = -[sum_i d_i ln theta_i + 1/2 sum_rs m_rs ln m_rs - M]
// up to the ln A_ij! terms (zero for simple graphs), where m_rs counts edge
// ends (m_rr = 2 e_rr) and theta_i = d_i / d_{g_i}.
inline double oracle_dcsbm_dl(const Graph& g, const Partition& p) {
  const auto a = dense(g);
  const auto d = degrees_of(a);
  const auto k = p.community_count();
  std::vector<double> group_deg(k, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) group_deg[p[i]] += d[i];
  std::vector<std::vector<double>> m(k, std::vector<double>(k, 0.0));
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < a.size(); ++j) m[p[i]][p[j]] += a[i][j];
  }
  double ll = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (d[i] > 0) ll += d[i] * std::log(d[i] / group_deg[p[i]]);
  }
  for (std::size_t r = 0; r < k; ++r) {
    for (std::size_t s = 0; s < k; ++s) {
      if (m[r][s] > 0) ll += 0.5 * m[r][s] * std::log(m[r][s]);
    }
  }
  ll -= static_cast<double>(g.edge_count());
  return -ll + oracle_penalty(static_cast<double>(k), static_cast<double>(g.node_count()),
                              static_cast<double>(g.edge_count()));
}

inline double oracle_bayes(const Graph& g, const Partition& p) {
  const auto b = oracle_blocks(g, p);
  double z = 0.0;
  for (const auto& [rs, e] : b.edges) {
    const double cap = b.capacity.at(rs);
    // ln B(e+1, cap-e+1) = ln Gamma(e+1) + ln Gamma(cap-e+1) - ln Gamma(cap+2)
    z += std::lgamma(e + 1.0) + std::lgamma(cap - e + 1.0) - std::lgamma(cap + 2.0);
  }
  const double n = static_cast<double>(g.node_count());
  return z - std::log(n) - n * std::log(static_cast<double>(p.community_count()));
}

// Map equation from module exit and visit rates on one connected graph,
// weighted per component by edge mass.
inline double oracle_map_equation(const Graph& g, const Partition& p) {
  const auto comp = connected_components(g);
  std::map<int, std::vector<NodeId>> members;
  for (NodeId i = 0; i < static_cast<NodeId>(g.node_count()); ++i) members[comp[i]].push_back(i);
  const auto a = dense(g);
  auto plogp = [](double x) { return x > 0.0 ? x * std::log2(x) : 0.0; };
  double total = 0.0, mass = 0.0;
  for (const auto& [c, nodes] : members) {
    double mc = 0.0;
    for (NodeId i : nodes) {
      for (NodeId j : nodes) mc += a[i][j];
    }
    mc /= 2.0;
    if (mc == 0.0) continue;
    std::map<int, double> exit, visit;
    double node_term = 0.0;
    for (NodeId i : nodes) {
      double di = 0.0;
      for (NodeId j : nodes) {
        di += a[i][j];
        if (a[i][j] && p[i] != p[j]) exit[p[i]] += 1.0 / (2.0 * mc);
      }
      visit[p[i]] += di / (2.0 * mc);
      exit[p[i]] += 0.0;
      node_term += plogp(di / (2.0 * mc));
    }
    double q = 0.0, l = 0.0;
    for (const auto& [m, qm] : exit) {
      q += qm;
      l -= 2.0 * plogp(qm);
      l += plogp(qm + visit[m]);
    }
    l += plogp(q) - node_term;
    total += mc * l;
    mass += mc;
  }
  return total / mass;
}

// Pair-enumeration AUC.
inline double oracle_auc(const std::vector<double>& pos, const std::vector<double>& neg) {
  double s = 0.0;
  for (double x : pos) {
    for (double y : neg) s += x > y ? 1.0 : (x == y ? 0.5 : 0.0);
  }
  return s / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

// Adjusted mutual information with max(H1, H2) normalization; expected MI
// from the hypergeometric model summed term by term.
inline double oracle_ami(const Partition& a, const Partition& b) {
  const double n = static_cast<double>(a.size());
  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> ra, cb;
  for (std::size_t i = 0; i < a.size(); ++i) {
    joint[{a[i], b[i]}] += 1.0;
    ra[a[i]] += 1.0;
    cb[b[i]] += 1.0;
  }
  double mi = 0.0, ha = 0.0, hb = 0.0;
  for (const auto& [ab, nij] : joint) {
    mi += nij / n * std::log(n * nij / (ra[ab.first] * cb[ab.second]));
  }
  for (const auto& [_, x] : ra) ha -= x / n * std::log(x / n);
  for (const auto& [_, x] : cb) hb -= x / n * std::log(x / n);
  double emi = 0.0;
  for (const auto& [_, ai] : ra) {
    for (const auto& [__, bj] : cb) {
      const int lo = std::max(1, static_cast<int>(ai + bj - n));
      const int hi = static_cast<int>(std::min(ai, bj));
      for (int nij = lo; nij <= hi; ++nij) {
        const double x = nij;
        const double logp = std::lgamma(ai + 1) + std::lgamma(bj + 1) + std::lgamma(n - ai + 1) +
                            std::lgamma(n - bj + 1) - std::lgamma(n + 1) - std::lgamma(x + 1) -
                            std::lgamma(ai - x + 1) - std::lgamma(bj - x + 1) -
                            std::lgamma(n - ai - bj + x + 1);
        emi += x / n * std::log(n * x / (ai * bj)) * std::exp(logp);
      }
    }
  }
  const double denom = std::max(ha, hb) - emi;
  if (std::abs(denom) < 1e-15) return 1.0;
  return (mi - emi) / denom;
}

}  // namespace cfit::test
