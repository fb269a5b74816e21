#include "cfit/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "cfit/error.hpp"
#include "cfit/rng.hpp"

namespace cfit {

Graph::Graph(std::size_t node_count, std::vector<Edge> edges, std::vector<std::string> names)
    : edges_(std::move(edges)), names_(std::move(names)) {
  const auto n = static_cast<NodeId>(node_count);
  for (auto& e : edges_) {
    if (e.u < 0 || e.v < 0 || e.u >= n || e.v >= n) {
      throw InvalidArgument("edge endpoint out of range");
    }
    if (e.u == e.v) throw InvalidArgument("self-loop on node " + std::to_string(e.u));
    e = make_edge(e.u, e.v);
  }
  std::sort(edges_.begin(), edges_.end());
  if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end()) {
    throw InvalidArgument("duplicate edge");
  }

  offsets_.assign(node_count + 1, 0);
  for (const auto& e : edges_) {
    ++offsets_[e.u + 1];
    ++offsets_[e.v + 1];
  }
  std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
  adjacency_.resize(2 * edges_.size());
  std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (const auto& e : edges_) {
    adjacency_[cursor[e.u]++] = e.v;
    adjacency_[cursor[e.v]++] = e.u;
  }
  for (std::size_t i = 0; i < node_count; ++i) {
    std::sort(adjacency_.begin() + offsets_[i], adjacency_.begin() + offsets_[i + 1]);
  }

  if (names_.empty()) {
    names_.reserve(node_count);
    for (std::size_t i = 0; i < node_count; ++i) names_.push_back(std::to_string(i));
  } else if (names_.size() != node_count) {
    throw InvalidArgument("name table size does not match node count");
  }
}

bool Graph::has_edge(NodeId i, NodeId j) const noexcept {
  auto nb = neighbors(i);
  return std::binary_search(nb.begin(), nb.end(), j);
}

Graph Graph::with_edges(std::vector<Edge> edges) const {
  return Graph(node_count(), std::move(edges), names_);
}

Graph load_edge_list(std::istream& in, LoadOptions opts) {
  std::unordered_map<std::string, NodeId> ids;
  std::vector<std::string> names;
  std::vector<Edge> edges;
  auto intern = [&](const std::string& token) {
    auto [it, inserted] = ids.try_emplace(token, static_cast<NodeId>(names.size()));
    if (inserted) names.push_back(token);
    return it->second;
  };

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream tokens(line);
    std::string a, b, extra;
    if (!(tokens >> a >> b)) throw ParseError(line_no, "expected two node ids");
    if (tokens >> extra) throw ParseError(line_no, "expected exactly two tokens, got more");
    NodeId u = intern(a);
    NodeId v = intern(b);
    edges.push_back(make_edge(u, v));
  }

  if (opts.simplify) {
    std::erase_if(edges, [](const Edge& e) { return e.u == e.v; });
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  }
  if (edges.empty()) throw EmptyGraphError();

  const auto n = names.size();
  Graph g(n, std::move(edges), std::move(names));
  if (opts.largest_component) g = largest_component(g);
  return g;
}

Graph load_edge_list_file(const std::string& path, LoadOptions opts) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open edge list '" + path + "'");
  return load_edge_list(in, opts);
}

std::string serialize(const Graph& g) {
  std::string out;
  out.reserve(g.edge_count() * 12);
  for (const auto& e : g.edges()) {
    out += std::to_string(e.u);
    out += ' ';
    out += std::to_string(e.v);
    out += '\n';
  }
  return out;
}

std::vector<NodeId> connected_components(const Graph& g, std::size_t* count) {
  const auto n = g.node_count();
  std::vector<NodeId> comp(n, -1);
  std::vector<NodeId> stack;
  NodeId next = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (comp[s] >= 0) continue;
    comp[s] = next;
    stack.push_back(static_cast<NodeId>(s));
    while (!stack.empty()) {
      NodeId u = stack.back();
      stack.pop_back();
      for (NodeId v : g.neighbors(u)) {
        if (comp[v] < 0) {
          comp[v] = next;
          stack.push_back(v);
        }
      }
    }
    ++next;
  }
  if (count) *count = static_cast<std::size_t>(next);
  return comp;
}

Graph largest_component(const Graph& g, std::vector<NodeId>* kept) {
  std::size_t count = 0;
  auto comp = connected_components(g, &count);
  std::vector<std::size_t> sizes(count, 0);
  for (auto c : comp) ++sizes[c];
  // max_element returns the first maximum, i.e. the component of the smallest node
  auto best = static_cast<NodeId>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());

  std::vector<NodeId> remap(g.node_count(), -1);
  std::vector<std::string> names;
  std::vector<NodeId> order;
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    if (comp[i] == best) {
      remap[i] = static_cast<NodeId>(order.size());
      order.push_back(static_cast<NodeId>(i));
      names.push_back(g.name(static_cast<NodeId>(i)));
    }
  }
  std::vector<Edge> edges;
  for (const auto& e : g.edges()) {
    if (comp[e.u] == best) edges.push_back({remap[e.u], remap[e.v]});
  }
  if (kept) *kept = std::move(order);
  const auto n = names.size();
  return Graph(n, std::move(edges), std::move(names));
}

PlantedGraph generate_planted_partition(const PlantedPartitionParams& params) {
  const auto& q = params.group_prior;
  if (params.nodes == 0) throw InvalidArgument("planted partition needs at least one node");
  if (q.empty()) throw InvalidArgument("planted partition needs k >= 1");
  for (double p : {params.p_in, params.p_out}) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("edge probability outside [0,1]");
  }
  double total = 0.0;
  for (double x : q) {
    if (!(x >= 0.0)) throw InvalidArgument("group prior has a negative entry");
    total += x;
  }
  if (std::abs(total - 1.0) > 1e-9) throw InvalidArgument("group prior does not sum to 1");
  if (params.p_out > params.p_in && !params.allow_disassortative) {
    throw InvalidArgument("p_out > p_in requires allow_disassortative");
  }

  PlantedGraph out;
  if (params.nodes < q.size()) {
    out.warnings.push_back("N < k: some planted groups will be empty");
  }

  Rng rng(params.seed);
  std::discrete_distribution<int> pick_group(q.begin(), q.end());
  std::vector<Label> groups(params.nodes);
  for (auto& g : groups) g = pick_group(rng);

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Edge> edges;
  const auto n = static_cast<NodeId>(params.nodes);
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) {
      double p = groups[i] == groups[j] ? params.p_in : params.p_out;
      if (unit(rng) < p) edges.push_back({i, j});
    }
  }

  Graph g(params.nodes, std::move(edges));
  if (params.largest_component && g.edge_count() > 0) {
    std::vector<NodeId> kept;
    g = largest_component(g, &kept);
    std::vector<Label> sub;
    sub.reserve(kept.size());
    for (auto i : kept) sub.push_back(groups[i]);
    groups = std::move(sub);
  }
  out.graph = std::move(g);
  out.planted = Partition(groups);
  return out;
}

}  // namespace cfit
