#pragma once

#include <memory>
#include <unordered_map>
#include <vector>

#include "cfit/detect.hpp"
#include "cfit/graph.hpp"
#include "cfit/linalg.hpp"
#include "cfit/objectives.hpp"
#include "cfit/partition.hpp"

namespace cfit {

enum class ScoreMode { MODEL_SPECIFIC, COMMON_SBM };

enum class ScoreKind {
  BLOCK_SBM,
  BLOCK_DCSBM,
  MODULARITY_DELTA,
  MAPEQ_DELTA,
  DL_DELTA_SBM,
  DL_DELTA_DCSBM,
  LOW_RANK,
  ADJACENCY,  // indicator of observed adjacency; a diagnostic scorer
};

std::string_view score_mode_name(ScoreMode m);
ScoreMode parse_score_mode(std::string_view name);  // "MODEL_SPECIFIC"/"model", "COMMON_SBM"/"sbm"

// The kind used for a method under a mode.
ScoreKind score_kind_for(MethodId method, ScoreMode mode);

// Immutable scoring context fitted on an observed graph G'. Safe to share
// between threads.
//
// Delta kinds score a pair by the objective gain of having the edge, with the
// partition held fixed: Q(G'+ij) - Q(G') or Obj(G') - Obj(G'+ij) for pairs
// outside G'. Pairs already in G' are scored by the gain of keeping them,
// i.e. the same quantity measured from G' - ij.
class ScoreModel {
 public:
  ScoreModel(ScoreKind kind, std::shared_ptr<const Graph> observed, Partition partition);

  ScoreKind kind() const noexcept { return kind_; }
  const Graph& graph() const noexcept { return *g_; }
  const Partition& partition() const noexcept { return p_; }
  const BlockStats& blocks() const noexcept { return stats_; }
  const std::vector<double>& theta() const noexcept { return theta_; }
  const EigenPairs& factors() const noexcept { return factors_; }
  // Objective at (G', P) for the delta kinds; 0 otherwise.
  double baseline() const noexcept { return baseline_; }

  // Symmetric pair score; i != j.
  double score(NodeId i, NodeId j) const;
  // Delta kinds evaluated by rebuilding the graph and recomputing the
  // objective from scratch. Same value as score() up to rounding.
  double score_full(NodeId i, NodeId j) const;

 private:
  struct MapSums {
    double edges = 0.0;      // M_c
    double deg_log = 0.0;    // sum_i d_i log2 d_i
    double cut_sum = 0.0;    // sum_m cut_m
    double cut_log = 0.0;    // sum_m cut_m log2 cut_m
    double total_log = 0.0;  // sum_m (cut_m + vol_m) log2 (cut_m + vol_m)
  };
  struct MapComponent {
    MapSums sums;
    double bits = 0.0;
    std::unordered_map<Label, std::pair<double, double>> modules;  // label -> (vol, cut)
  };
  static double map_bits(const MapSums& s);

  double modularity_delta(NodeId i, NodeId j, bool present) const;
  double dl_delta(NodeId i, NodeId j, bool present) const;
  double mapeq_delta(NodeId i, NodeId j, bool present) const;
  double objective_of(const Graph& g) const;

  ScoreKind kind_;
  std::shared_ptr<const Graph> g_;
  Partition p_;
  BlockStats stats_;
  std::vector<double> theta_;
  EigenPairs factors_;
  Eigen::MatrixXd scaled_;  // vectors * diag(values)
  double baseline_ = 0.0;

  // modularity
  double within_ = 0.0;
  double degree_sq_ = 0.0;
  // map equation
  std::vector<NodeId> comp_;
  std::vector<MapComponent> comps_;
  double weighted_bits_ = 0.0;  // sum_c M_c L_c
  std::unordered_map<std::uint64_t, double> bridge_scores_;
};

ScoreModel build_score_model(MethodId method, const Graph& observed, const Partition& p,
                             ScoreMode mode);
ScoreModel build_score_model(ScoreKind kind, const Graph& observed, const Partition& p);

// Free-function views used by the benchmark and in tests.
double score_block_sbm(const ScoreModel& ctx, NodeId i, NodeId j);
double score_block_dcsbm(const ScoreModel& ctx, NodeId i, NodeId j);
double score_objective_delta(const ScoreModel& ctx, NodeId i, NodeId j);
double score_spectral_lowrank(const ScoreModel& ctx, NodeId i, NodeId j);

}  // namespace cfit
