#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cfit/detect.hpp"
#include "cfit/graph.hpp"
#include "cfit/score.hpp"

namespace cfit {

enum class Task { PREDICTION, DESCRIPTION };

std::string_view task_name(Task t);
Task parse_task(std::string_view name);

// Holdout split of a graph. The observed graph keeps every node, including
// those left isolated by the split.
struct SampledGraph {
  std::shared_ptr<const Graph> full;
  double alpha = 0.0;
  std::uint64_t seed = 0;
  Graph observed;                    // G' = (V, E')
  std::vector<Edge> observed_edges;  // E', sorted
  std::vector<Edge> missing_edges;   // E \ E', sorted
};

// |E'| = clamp(round-half-up(alpha * M), 1, M - 1).
std::size_t observed_edge_count(std::size_t edges, double alpha);
SampledGraph sample_edges(const Graph& g, double alpha, std::uint64_t seed);

// [#(p > n) + #(p = n) / 2] / (|P| |N|), computed exactly.
double auc_exact(std::span<const double> positives, std::span<const double> negatives);
// Mean of n_samples Bernoulli draws with uniformly drawn positive and negative.
double auc_monte_carlo(std::span<const double> positives, std::span<const double> negatives,
                       std::size_t n_samples, std::uint64_t seed);

using PairScorer = std::function<double(NodeId, NodeId)>;

// Negatives are every unordered pair of distinct nodes that is not an edge of
// `excluded`; they are drawn by rejection.
double auc_monte_carlo(const PairScorer& score, std::span<const Edge> positives,
                       const Graph& excluded, std::size_t n_samples, std::uint64_t seed);
double auc_exact(const PairScorer& score, std::span<const Edge> positives, const Graph& excluded);

struct BenchOptions {
  std::size_t mc_samples = 10'000;
  bool exact = false;                      // exact AUC when the pair count fits the budget
  std::size_t exact_pair_budget = 1'000'000;
};

// AUC of a scorer on one task of a split.
double evaluate_split(const SampledGraph& split, const PairScorer& score, Task task,
                      const BenchOptions& opts, std::uint64_t seed);

struct TaskResult {
  std::string network;
  MethodId method = MethodId::Q_LOUVAIN;
  Task task = Task::PREDICTION;
  ScoreMode mode = ScoreMode::MODEL_SPECIFIC;
  double alpha = 0.0;
  int replicate = 0;
  double auc = 0.0;
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::optional<std::string> error;  // set for failed runs, which carry no AUC

  bool failed() const noexcept { return error.has_value(); }
};

// Both tasks on one split and one fit: index 0 is PREDICTION, 1 DESCRIPTION.
std::array<TaskResult, 2> run_task_pair(const Graph& g, MethodId method, double alpha,
                                        std::uint64_t seed, ScoreMode mode,
                                        const BenchOptions& opts = {});
TaskResult run_task(const Graph& g, MethodId method, Task task, double alpha, std::uint64_t seed,
                    ScoreMode mode, const BenchOptions& opts = {});

// Seed of one (alpha, replicate) cell; the split depends only on this value,
// so all methods see the same observed graphs. Keyed by the alpha value so a
// cell keeps its seed when the grid is extended.
std::uint64_t replicate_seed(std::uint64_t base, double alpha, int replicate);

std::vector<double> default_alpha_grid();

struct CurvePoint {
  double alpha = 0.0;
  double mean_auc = 0.0;
  double stderr_auc = 0.0;  // 0 when count == 1
  std::size_t count = 0;
};

struct AccuracyCurve {
  MethodId method = MethodId::Q_LOUVAIN;
  Task task = Task::PREDICTION;
  ScoreMode mode = ScoreMode::MODEL_SPECIFIC;
  std::string domain;  // set when grouped by domain
  std::vector<CurvePoint> points;
};

AccuracyCurve accuracy_curve(const Graph& g, MethodId method, Task task,
                             const std::vector<double>& alpha_grid, int replicates,
                             std::uint64_t seed, ScoreMode mode, const BenchOptions& opts = {});

// Mean and standard error of AUC values; failed results are skipped.
CurvePoint summarize(double alpha, std::span<const double> values);

enum class GroupBy { METHOD, METHOD_DOMAIN };

// Benchmark curves: per network the replicate mean at each alpha, then the
// unweighted mean over networks. `domains` maps network -> domain and is
// required for METHOD_DOMAIN.
std::vector<AccuracyCurve> aggregate(const std::vector<TaskResult>& results, GroupBy group_by,
                                     const std::map<std::string, std::string>& domains = {},
                                     std::vector<std::string>* warnings = nullptr);

struct BestFraction {
  Task task = Task::PREDICTION;
  ScoreMode mode = ScoreMode::MODEL_SPECIFIC;
  std::vector<MethodId> methods;
  std::vector<double> alphas;
  std::vector<std::vector<double>> fraction;  // [method][alpha]
};

inline constexpr double kDefaultBestTolerance = 0.05;

// Fraction of networks on which each method is within `tol` of the best AUC.
std::vector<BestFraction> best_fraction(const std::vector<TaskResult>& results,
                                        double tol = kDefaultBestTolerance);

}  // namespace cfit
