#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cfit/partition.hpp"

namespace cfit {

using NodeId = std::int32_t;

struct Edge {
  NodeId u;
  NodeId v;  // always u < v inside a Graph

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Simple undirected graph on nodes 0..N-1. Immutable once built.
//
// The edge list is kept sorted by (u, v) with u < v; adjacency is stored in
// CSR form with every neighbor list sorted, so membership tests are a binary
// search.
class Graph {
 public:
  Graph() = default;

  // Builds from an edge list. Throws InvalidArgument on self-loops, duplicate
  // edges or out-of-range endpoints.
  Graph(std::size_t node_count, std::vector<Edge> edges,
        std::vector<std::string> names = {});

  std::size_t node_count() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  std::span<const Edge> edges() const noexcept { return edges_; }
  std::span<const NodeId> neighbors(NodeId i) const noexcept {
    return {adjacency_.data() + offsets_[i], adjacency_.data() + offsets_[i + 1]};
  }
  std::size_t degree(NodeId i) const noexcept { return offsets_[i + 1] - offsets_[i]; }
  bool has_edge(NodeId i, NodeId j) const noexcept;

  // Original node identifiers (sidecar mapping); synthesized as "0", "1", ...
  // when the graph was not loaded from text.
  const std::vector<std::string>& names() const noexcept { return names_; }
  const std::string& name(NodeId i) const { return names_[i]; }

  // Same node set, only the given edges (which must be a subset of edges()).
  Graph with_edges(std::vector<Edge> edges) const;

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.node_count() == b.node_count() && a.edges_ == b.edges_;
  }

 private:
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> adjacency_;
  std::vector<std::string> names_;
};

inline Edge make_edge(NodeId a, NodeId b) { return a < b ? Edge{a, b} : Edge{b, a}; }

struct LoadOptions {
  bool simplify = true;
  bool largest_component = false;
};

// Parses a whitespace-separated edge list. Node ids are arbitrary tokens and
// are remapped densely by first appearance. Lines starting with '#' and blank
// lines are skipped.
Graph load_edge_list(std::istream& in, LoadOptions opts = {});
Graph load_edge_list_file(const std::string& path, LoadOptions opts = {});

// Canonical serialization: sorted "u v" lines using dense integer ids.
std::string serialize(const Graph& g);

// Component id per node (ids assigned in order of the smallest node).
std::vector<NodeId> connected_components(const Graph& g, std::size_t* count = nullptr);

// Induced subgraph on the largest connected component (ties broken by the
// component containing the smallest node id). `kept` receives the original
// ids of the retained nodes in their new order.
Graph largest_component(const Graph& g, std::vector<NodeId>* kept = nullptr);

struct PlantedPartitionParams {
  std::size_t nodes = 0;
  std::vector<double> group_prior;  // q_a, sums to 1
  double p_in = 0.0;
  double p_out = 0.0;
  std::uint64_t seed = 0;
  bool allow_disassortative = false;
  bool simplify = true;
  bool largest_component = false;
};

struct PlantedGraph {
  Graph graph;
  Partition planted;
  std::vector<std::string> warnings;
};

PlantedGraph generate_planted_partition(const PlantedPartitionParams& params);

}  // namespace cfit
