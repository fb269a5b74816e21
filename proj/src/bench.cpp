#include "cfit/bench.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <set>
#include <tuple>

#include "cfit/error.hpp"
#include "cfit/rng.hpp"

namespace cfit {

std::string_view task_name(Task t) { return t == Task::PREDICTION ? "PREDICTION" : "DESCRIPTION"; }

Task parse_task(std::string_view name) {
  if (name == "PREDICTION") return Task::PREDICTION;
  if (name == "DESCRIPTION") return Task::DESCRIPTION;
  throw InvalidArgument("unknown task '" + std::string(name) + "'");
}

std::size_t observed_edge_count(std::size_t edges, double alpha) {
  if (edges < 2) throw InvalidArgument("cannot split a graph with fewer than 2 edges");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
  const double raw = std::floor(alpha * static_cast<double>(edges) + 0.5);
  return std::clamp<std::size_t>(static_cast<std::size_t>(raw), 1, edges - 1);
}

SampledGraph sample_edges(const Graph& g, double alpha, std::uint64_t seed) {
  const std::size_t keep = observed_edge_count(g.edge_count(), alpha);
  std::vector<std::size_t> idx(g.edge_count());
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  // partial Fisher-Yates: the first `keep` slots are a uniform subset
  for (std::size_t t = 0; t < keep; ++t) {
    std::uniform_int_distribution<std::size_t> pick(t, idx.size() - 1);
    std::swap(idx[t], idx[pick(rng)]);
  }
  std::vector<bool> kept(g.edge_count(), false);
  for (std::size_t t = 0; t < keep; ++t) kept[idx[t]] = true;

  SampledGraph s;
  s.full = std::make_shared<const Graph>(g);
  s.alpha = alpha;
  s.seed = seed;
  const auto edges = g.edges();
  for (std::size_t t = 0; t < edges.size(); ++t) {
    (kept[t] ? s.observed_edges : s.missing_edges).push_back(edges[t]);
  }
  s.observed = g.with_edges(s.observed_edges);
  return s;
}

double auc_exact(std::span<const double> positives, std::span<const double> negatives) {
  if (positives.empty() || negatives.empty()) throw InvalidArgument("AUC undefined for an empty set");
  std::vector<double> neg(negatives.begin(), negatives.end());
  std::sort(neg.begin(), neg.end());
  std::uint64_t twice = 0;  // 2 * (#greater) + #equal, exact in integers
  for (double p : positives) {
    const auto lo = std::lower_bound(neg.begin(), neg.end(), p);
    const auto hi = std::upper_bound(lo, neg.end(), p);
    twice += 2 * static_cast<std::uint64_t>(lo - neg.begin()) + static_cast<std::uint64_t>(hi - lo);
  }
  return static_cast<double>(twice) /
         (2.0 * static_cast<double>(positives.size()) * static_cast<double>(neg.size()));
}

namespace {

double credit(double p, double n) { return p > n ? 1.0 : (p == n ? 0.5 : 0.0); }

std::pair<NodeId, NodeId> draw_negative(const Graph& excluded, Rng& rng) {
  std::uniform_int_distribution<NodeId> node(0, static_cast<NodeId>(excluded.node_count() - 1));
  while (true) {
    const NodeId i = node(rng), j = node(rng);
    if (i == j || excluded.has_edge(i, j)) continue;
    return {i, j};
  }
}

std::size_t pair_count(const Graph& g) {
  const auto n = g.node_count();
  return n * (n - 1) / 2;
}

}  // namespace

double auc_monte_carlo(std::span<const double> positives, std::span<const double> negatives,
                       std::size_t n_samples, std::uint64_t seed) {
  if (positives.empty() || negatives.empty()) throw InvalidArgument("AUC undefined for an empty set");
  if (n_samples == 0) throw InvalidArgument("n_samples must be at least 1");
  Rng rng(seed);
  std::uniform_int_distribution<std::size_t> pp(0, positives.size() - 1), nn(0, negatives.size() - 1);
  double total = 0.0;
  for (std::size_t s = 0; s < n_samples; ++s) {
    const double p = positives[pp(rng)];
    total += credit(p, negatives[nn(rng)]);
  }
  return total / static_cast<double>(n_samples);
}

double auc_monte_carlo(const PairScorer& score, std::span<const Edge> positives,
                       const Graph& excluded, std::size_t n_samples, std::uint64_t seed) {
  if (positives.empty() || pair_count(excluded) <= excluded.edge_count()) {
    throw InvalidArgument("AUC undefined for an empty set");
  }
  if (n_samples == 0) throw InvalidArgument("n_samples must be at least 1");
  std::vector<double> pos(positives.size());
  for (std::size_t t = 0; t < positives.size(); ++t) pos[t] = score(positives[t].u, positives[t].v);
  Rng rng(seed);
  std::uniform_int_distribution<std::size_t> pp(0, pos.size() - 1);
  double total = 0.0;
  for (std::size_t s = 0; s < n_samples; ++s) {
    const double p = pos[pp(rng)];
    const auto [i, j] = draw_negative(excluded, rng);
    total += credit(p, score(i, j));
  }
  return total / static_cast<double>(n_samples);
}

double auc_exact(const PairScorer& score, std::span<const Edge> positives, const Graph& excluded) {
  std::vector<double> pos(positives.size()), neg;
  for (std::size_t t = 0; t < positives.size(); ++t) pos[t] = score(positives[t].u, positives[t].v);
  const auto n = static_cast<NodeId>(excluded.node_count());
  neg.reserve(pair_count(excluded) - excluded.edge_count());
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) {
      if (!excluded.has_edge(i, j)) neg.push_back(score(i, j));
    }
  }
  return auc_exact(pos, neg);
}

double evaluate_split(const SampledGraph& split, const PairScorer& score, Task task,
                      const BenchOptions& opts, std::uint64_t seed) {
  const bool predict = task == Task::PREDICTION;
  const auto& positives = predict ? split.missing_edges : split.observed_edges;
  const Graph& excluded = predict ? *split.full : split.observed;
  if (opts.exact && pair_count(excluded) <= opts.exact_pair_budget) {
    return auc_exact(score, positives, excluded);
  }
  return auc_monte_carlo(score, positives, excluded, opts.mc_samples, seed);
}

std::array<TaskResult, 2> run_task_pair(const Graph& g, MethodId method, double alpha,
                                        std::uint64_t seed, ScoreMode mode,
                                        const BenchOptions& opts) {
  std::array<TaskResult, 2> out;
  for (int t = 0; t < 2; ++t) {
    out[t].method = method;
    out[t].task = t == 0 ? Task::PREDICTION : Task::DESCRIPTION;
    out[t].mode = mode;
    out[t].alpha = alpha;
    out[t].seed = seed;
  }
  const auto split = sample_edges(g, alpha, derive_seed(seed, "split"));
  const auto name = method_name(method);
  const auto fit = detect(method, split.observed, derive_seed(seed, "detect", name));
  for (auto& r : out) r.k = fit.k;
  if (fit.failed()) {
    for (auto& r : out) r.error = *fit.failure;
    return out;
  }
  try {
    const ScoreModel model(score_kind_for(method, mode), std::make_shared<const Graph>(split.observed),
                           fit.partition);
    const PairScorer scorer = [&model](NodeId i, NodeId j) { return model.score(i, j); };
    for (auto& r : out) {
      r.auc = evaluate_split(split, scorer, r.task, opts,
                             derive_seed(seed, "auc", name, task_name(r.task)));
    }
  } catch (const Error& e) {
    for (auto& r : out) r.error = e.what();
  }
  return out;
}

TaskResult run_task(const Graph& g, MethodId method, Task task, double alpha, std::uint64_t seed,
                    ScoreMode mode, const BenchOptions& opts) {
  auto pair = run_task_pair(g, method, alpha, seed, mode, opts);
  return pair[task == Task::PREDICTION ? 0 : 1];
}

std::uint64_t replicate_seed(std::uint64_t base, double alpha, int replicate) {
  return derive_seed(base, std::bit_cast<std::uint64_t>(alpha), static_cast<std::uint64_t>(replicate));
}

std::vector<double> default_alpha_grid() {
  std::vector<double> grid;
  for (int t = 1; t <= 9; ++t) grid.push_back(t / 10.0);
  return grid;
}

CurvePoint summarize(double alpha, std::span<const double> values) {
  CurvePoint p;
  p.alpha = alpha;
  p.count = values.size();
  if (values.empty()) return p;
  const double n = static_cast<double>(values.size());
  p.mean_auc = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - p.mean_auc) * (v - p.mean_auc);
    p.stderr_auc = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  return p;
}

namespace {

void check_grid(const std::vector<double>& grid) {
  if (grid.empty()) throw InvalidArgument("alpha grid is empty");
  for (std::size_t t = 0; t < grid.size(); ++t) {
    if (!(grid[t] > 0.0 && grid[t] < 1.0)) throw InvalidArgument("alpha values must lie in (0, 1)");
    if (t > 0 && !(grid[t] > grid[t - 1])) throw InvalidArgument("alpha grid must be increasing");
  }
}

}  // namespace

AccuracyCurve accuracy_curve(const Graph& g, MethodId method, Task task,
                             const std::vector<double>& alpha_grid, int replicates,
                             std::uint64_t seed, ScoreMode mode, const BenchOptions& opts) {
  check_grid(alpha_grid);
  if (replicates < 1) throw InvalidArgument("replicates must be at least 1");
  AccuracyCurve curve;
  curve.method = method;
  curve.task = task;
  curve.mode = mode;
  for (std::size_t a = 0; a < alpha_grid.size(); ++a) {
    std::vector<double> values;
    for (int r = 0; r < replicates; ++r) {
      const auto res = run_task(g, method, task, alpha_grid[a], replicate_seed(seed, alpha_grid[a], r), mode, opts);
      if (!res.failed()) values.push_back(res.auc);
    }
    if (!values.empty()) curve.points.push_back(summarize(alpha_grid[a], values));
  }
  return curve;
}

std::vector<AccuracyCurve> aggregate(const std::vector<TaskResult>& results, GroupBy group_by,
                                     const std::map<std::string, std::string>& domains,
                                     std::vector<std::string>* warnings) {
  using Key = std::tuple<MethodId, Task, ScoreMode, std::string>;
  // key -> alpha -> network -> replicate AUCs
  std::map<Key, std::map<double, std::map<std::string, std::vector<double>>>> groups;
  std::set<Key> seen;
  for (const auto& r : results) {
    std::string domain;
    if (group_by == GroupBy::METHOD_DOMAIN) {
      auto it = domains.find(r.network);
      if (it == domains.end()) throw InvalidArgument("no domain for network '" + r.network + "'");
      domain = it->second;
    }
    Key key{r.method, r.task, r.mode, domain};
    seen.insert(key);
    if (!r.failed()) groups[key][r.alpha][r.network].push_back(r.auc);
  }
  std::vector<AccuracyCurve> out;
  for (const auto& key : seen) {
    auto it = groups.find(key);
    if (it == groups.end()) {
      if (warnings) {
        warnings->push_back("no successful results for " + std::string(method_name(std::get<0>(key))) +
                            " " + std::string(task_name(std::get<1>(key))));
      }
      continue;
    }
    AccuracyCurve c;
    std::tie(c.method, c.task, c.mode, c.domain) = key;
    for (const auto& [alpha, per_network] : it->second) {
      std::vector<double> means;
      for (const auto& [network, values] : per_network) {
        means.push_back(std::accumulate(values.begin(), values.end(), 0.0) /
                        static_cast<double>(values.size()));
      }
      c.points.push_back(summarize(alpha, means));
    }
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<BestFraction> best_fraction(const std::vector<TaskResult>& results, double tol) {
  using Key = std::pair<Task, ScoreMode>;
  // (task, mode) -> alpha -> network -> method -> replicate AUCs
  std::map<Key, std::map<double, std::map<std::string, std::map<MethodId, std::vector<double>>>>> data;
  std::map<Key, std::set<MethodId>> methods;
  for (const auto& r : results) {
    const Key key{r.task, r.mode};
    methods[key].insert(r.method);
    if (!r.failed()) data[key][r.alpha][r.network][r.method].push_back(r.auc);
  }
  std::vector<BestFraction> out;
  for (const auto& [key, by_alpha] : data) {
    BestFraction bf;
    bf.task = key.first;
    bf.mode = key.second;
    bf.methods.assign(methods[key].begin(), methods[key].end());
    std::map<MethodId, std::size_t> row;
    for (std::size_t m = 0; m < bf.methods.size(); ++m) row[bf.methods[m]] = m;
    bf.fraction.assign(bf.methods.size(), {});
    for (const auto& [alpha, by_network] : by_alpha) {
      bf.alphas.push_back(alpha);
      std::vector<double> wins(bf.methods.size(), 0.0);
      for (const auto& [network, by_method] : by_network) {
        std::map<MethodId, double> mean;
        double best = -1.0;
        for (const auto& [m, values] : by_method) {
          mean[m] = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
          best = std::max(best, mean[m]);
        }
        for (const auto& [m, v] : mean) {
          if (v >= best - tol) wins[row[m]] += 1.0;
        }
      }
      const double networks = static_cast<double>(by_network.size());
      for (std::size_t m = 0; m < bf.methods.size(); ++m) bf.fraction[m].push_back(wins[m] / networks);
    }
    out.push_back(std::move(bf));
  }
  return out;
}

}  // namespace cfit
