#pragma once

#include <cstdint>
#include <vector>

#include "cfit/graph.hpp"

namespace cfit::detail {

enum class LocalObjective { Modularity, MapEquation };

struct LouvainOutcome {
  std::vector<Label> labels;
  // objective on the original graph after each aggregation level
  // (modularity, or map-equation bits for the graph as a single component)
  std::vector<double> level_objective;
};

// Two-phase local moving + aggregation, repeated until a level makes no move.
// Modularity is maximized, the map equation minimized. The map-equation
// variant expects a connected graph.
LouvainOutcome louvain(const Graph& g, LocalObjective objective, std::uint64_t seed);

}  // namespace cfit::detail
