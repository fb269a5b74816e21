#include "louvain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cfit/objectives.hpp"
#include "cfit/rng.hpp"

namespace cfit::detail {

namespace {

struct WeightedGraph {
  std::vector<std::vector<std::pair<int, double>>> adj;  // no self entries
  std::vector<double> self_weight;                        // internal weight, counted once
  std::vector<double> strength;                           // total original degree
  double volume = 0.0;                                    // 2M

  std::size_t size() const { return adj.size(); }
};

WeightedGraph from_graph(const Graph& g) {
  WeightedGraph w;
  const auto n = g.node_count();
  w.adj.resize(n);
  w.self_weight.assign(n, 0.0);
  w.strength.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto j : g.neighbors(static_cast<NodeId>(i))) w.adj[i].emplace_back(j, 1.0);
    w.strength[i] = static_cast<double>(g.degree(static_cast<NodeId>(i)));
  }
  w.volume = 2.0 * static_cast<double>(g.edge_count());
  return w;
}

WeightedGraph aggregate(const WeightedGraph& w, const std::vector<int>& module, int count) {
  WeightedGraph out;
  out.adj.resize(count);
  out.self_weight.assign(count, 0.0);
  out.strength.assign(count, 0.0);
  out.volume = w.volume;
  std::vector<double> acc(count, 0.0);
  std::vector<int> touched;
  std::vector<std::vector<int>> members(count);
  for (std::size_t u = 0; u < w.size(); ++u) members[module[u]].push_back(static_cast<int>(u));
  for (int m = 0; m < count; ++m) {
    touched.clear();
    for (int u : members[m]) {
      out.strength[m] += w.strength[u];
      out.self_weight[m] += w.self_weight[u];
      for (auto [v, wt] : w.adj[u]) {
        const int mv = module[v];
        if (mv == m) {
          out.self_weight[m] += wt / 2.0;  // each internal edge seen from both ends
        } else {
          if (acc[mv] == 0.0) touched.push_back(mv);
          acc[mv] += wt;
        }
      }
    }
    std::sort(touched.begin(), touched.end());
    for (int mv : touched) {
      out.adj[m].emplace_back(mv, acc[mv]);
      acc[mv] = 0.0;
    }
  }
  return out;
}

class LocalMover {
 public:
  LocalMover(const WeightedGraph& w, LocalObjective obj)
      : w_(w), obj_(obj), module_(w.size()), vol_(w.size()), in_(w.size()),
        link_(w.size(), 0.0) {
    for (std::size_t u = 0; u < w.size(); ++u) {
      module_[u] = static_cast<int>(u);
      vol_[u] = w.strength[u];
      in_[u] = w.self_weight[u];
    }
    if (obj_ == LocalObjective::MapEquation) {
      exit_sum_ = 0.0;
      for (std::size_t m = 0; m < w.size(); ++m) exit_sum_ += cut(static_cast<int>(m)) / w_.volume;
    }
  }

  // One local-moving phase; returns whether any node changed module.
  bool run(Rng& rng) {
    std::vector<int> order(w_.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    bool any = false;
    for (int sweep = 0; sweep < 1000; ++sweep) {
      int moves = 0;
      for (int u : order) moves += move_node(u) ? 1 : 0;
      if (moves == 0) break;
      any = true;
    }
    return any;
  }

  // Dense module ids 0..count-1 in order of first appearance.
  std::vector<int> compact(int& count) const {
    std::vector<int> remap(w_.size(), -1), out(w_.size());
    count = 0;
    for (std::size_t u = 0; u < w_.size(); ++u) {
      auto& r = remap[module_[u]];
      if (r < 0) r = count++;
      out[u] = r;
    }
    return out;
  }

 private:
  double cut(int m) const { return vol_[m] - 2.0 * in_[m]; }

  bool move_node(int u) {
    const int a = module_[u];
    touched_.clear();
    for (auto [v, wt] : w_.adj[u]) {
      const int mv = module_[v];
      if (link_[mv] == 0.0) touched_.push_back(mv);
      link_[mv] += wt;
    }
    const double su = w_.strength[u];
    const double self = w_.self_weight[u];

    // detach u from a
    remove(u, a, link_[a]);

    int best = a;
    double best_gain = gain(u, a, link_[a], su, self);
    std::sort(touched_.begin(), touched_.end());
    for (int b : touched_) {
      if (b == a) continue;
      const double g = gain(u, b, link_[b], su, self);
      if (g > best_gain + 1e-12) {
        best_gain = g;
        best = b;
      }
    }
    insert(u, best, link_[best]);
    for (int m : touched_) link_[m] = 0.0;
    link_[a] = 0.0;
    return best != a;
  }

  void remove(int u, int a, double link_a) {
    if (obj_ == LocalObjective::MapEquation) exit_sum_ -= cut(a) / w_.volume;
    vol_[a] -= w_.strength[u];
    in_[a] -= w_.self_weight[u] + link_a;
    if (obj_ == LocalObjective::MapEquation) {
      exit_sum_ += cut(a) / w_.volume;
      exit_sum_ += (w_.strength[u] - 2.0 * w_.self_weight[u]) / w_.volume;  // u alone
    }
    module_[u] = -1;
  }

  void insert(int u, int b, double link_b) {
    if (obj_ == LocalObjective::MapEquation) {
      exit_sum_ -= cut(b) / w_.volume;
      exit_sum_ -= (w_.strength[u] - 2.0 * w_.self_weight[u]) / w_.volume;
    }
    vol_[b] += w_.strength[u];
    in_[b] += w_.self_weight[u] + link_b;
    if (obj_ == LocalObjective::MapEquation) exit_sum_ += cut(b) / w_.volume;
    module_[u] = b;
  }

  // Objective improvement of placing the detached node u into module b.
  double gain(int u, int b, double link_b, double su, double self) const {
    (void)u;
    const double W = w_.volume;
    if (obj_ == LocalObjective::Modularity) {
      const double m = W / 2.0;
      return link_b / m - su * vol_[b] / (2.0 * m * m);
    }
    const double qu = (su - 2.0 * self) / W;
    const double pu = su / W;
    const double qb = cut(b) / W;
    const double pb = vol_[b] / W;
    const double qb_new = (cut(b) + su - 2.0 * self - 2.0 * link_b) / W;
    const double pb_new = pb + pu;
    const double total_new = exit_sum_ - qu - qb + qb_new;
    const double delta = plogp2(total_new) - plogp2(exit_sum_) -
                         2.0 * (plogp2(qb_new) - plogp2(qb) - plogp2(qu)) +
                         (plogp2(qb_new + pb_new) - plogp2(qb + pb) - plogp2(qu + pu));
    return -delta;
  }

  const WeightedGraph& w_;
  LocalObjective obj_;
  std::vector<int> module_;
  std::vector<double> vol_, in_;
  std::vector<double> link_;
  std::vector<int> touched_;
  double exit_sum_ = 0.0;
};

double evaluate(const Graph& g, const std::vector<Label>& labels, LocalObjective obj) {
  Partition p(labels);
  return obj == LocalObjective::Modularity ? modularity(g, p) : map_equation(g, p);
}

}  // namespace

LouvainOutcome louvain(const Graph& g, LocalObjective objective, std::uint64_t seed) {
  LouvainOutcome out;
  const auto n = g.node_count();
  out.labels.resize(n);
  std::iota(out.labels.begin(), out.labels.end(), 0);
  if (g.edge_count() == 0) return out;

  Rng rng(seed);
  WeightedGraph level = from_graph(g);
  std::vector<int> node_to_super(n);
  std::iota(node_to_super.begin(), node_to_super.end(), 0);
  out.level_objective.push_back(evaluate(g, out.labels, objective));

  while (true) {
    LocalMover mover(level, objective);
    if (!mover.run(rng)) break;
    int count = 0;
    auto module = mover.compact(count);
    for (auto& s : node_to_super) s = module[s];
    for (std::size_t i = 0; i < n; ++i) out.labels[i] = node_to_super[i];
    out.level_objective.push_back(evaluate(g, out.labels, objective));
    if (static_cast<std::size_t>(count) == level.size()) break;
    level = aggregate(level, module, count);
  }
  out.labels = Partition(out.labels).labels();
  return out;
}

}  // namespace cfit::detail
