#include "cfit/score.hpp"

#include <algorithm>
#include <cmath>

#include "cfit/error.hpp"
#include "cfit/spectral.hpp"

namespace cfit {

using detail::plogp2;
using detail::xlogx;

namespace {

std::uint64_t pair_key(NodeId i, NodeId j) {
  const auto e = make_edge(i, j);
  return (static_cast<std::uint64_t>(e.u) << 32) | static_cast<std::uint32_t>(e.v);
}

// Bridges of g, found with an iterative Tarjan low-link pass.
std::vector<Edge> bridges(const Graph& g) {
  const auto n = g.node_count();
  std::vector<int> disc(n, -1), low(n, 0);
  std::vector<Edge> out;
  int timer = 0;
  struct Frame {
    NodeId node;
    NodeId parent;
    std::size_t next;
  };
  std::vector<Frame> stack;
  for (std::size_t root = 0; root < n; ++root) {
    if (disc[root] >= 0) continue;
    stack.push_back({static_cast<NodeId>(root), -1, 0});
    disc[root] = low[root] = timer++;
    while (!stack.empty()) {
      auto& f = stack.back();
      const auto nbrs = g.neighbors(f.node);
      if (f.next < nbrs.size()) {
        const NodeId v = nbrs[f.next++];
        if (v == f.parent) continue;  // simple graph: one parent edge
        if (disc[v] < 0) {
          disc[v] = low[v] = timer++;
          stack.push_back({v, f.node, 0});
        } else {
          low[f.node] = std::min(low[f.node], disc[v]);
        }
        continue;
      }
      const NodeId u = f.node, parent = f.parent;
      stack.pop_back();
      if (parent >= 0) {
        low[parent] = std::min(low[parent], low[u]);
        if (low[u] > disc[parent]) out.push_back(make_edge(parent, u));
      }
    }
  }
  return out;
}

Graph toggled(const Graph& g, NodeId i, NodeId j, bool present) {
  std::vector<Edge> edges(g.edges().begin(), g.edges().end());
  const Edge e = make_edge(i, j);
  if (present) {
    edges.erase(std::find(edges.begin(), edges.end(), e));
  } else {
    edges.push_back(e);
  }
  return Graph(g.node_count(), std::move(edges));
}

bool is_delta(ScoreKind k) {
  return k == ScoreKind::MODULARITY_DELTA || k == ScoreKind::MAPEQ_DELTA ||
         k == ScoreKind::DL_DELTA_SBM || k == ScoreKind::DL_DELTA_DCSBM;
}

}  // namespace

std::string_view score_mode_name(ScoreMode m) {
  return m == ScoreMode::MODEL_SPECIFIC ? "MODEL_SPECIFIC" : "COMMON_SBM";
}

ScoreMode parse_score_mode(std::string_view name) {
  if (name == "MODEL_SPECIFIC" || name == "model") return ScoreMode::MODEL_SPECIFIC;
  if (name == "COMMON_SBM" || name == "sbm") return ScoreMode::COMMON_SBM;
  throw InvalidArgument("unknown score mode '" + std::string(name) + "' (expected model or sbm)");
}

ScoreKind score_kind_for(MethodId method, ScoreMode mode) {
  if (mode == ScoreMode::COMMON_SBM) return ScoreKind::BLOCK_SBM;
  switch (method) {
    case MethodId::Q_LOUVAIN:
      return ScoreKind::MODULARITY_DELTA;
    case MethodId::MAPEQ:
      return ScoreKind::MAPEQ_DELTA;
    case MethodId::MDL_SBM:
      return ScoreKind::DL_DELTA_SBM;
    case MethodId::MDL_DCSBM:
      return ScoreKind::DL_DELTA_DCSBM;
    case MethodId::BAYES_SBM:
      return ScoreKind::BLOCK_SBM;
    case MethodId::SPECTRAL_BH:
    case MethodId::SPECTRAL_NB:
      return ScoreKind::LOW_RANK;
  }
  return ScoreKind::BLOCK_SBM;
}

double ScoreModel::map_bits(const MapSums& s) {
  const double w = 2.0 * s.edges;
  if (w == 0.0) return 0.0;
  const double lw = std::log2(w);
  const double exit_total = s.cut_sum / w;
  const double exit_terms = s.cut_log / w - exit_total * lw;
  const double node_terms = s.deg_log / w - lw;
  const double module_terms = s.total_log / w - (s.cut_sum + w) / w * lw;
  return plogp2(exit_total) - 2.0 * exit_terms - node_terms + module_terms;
}

ScoreModel::ScoreModel(ScoreKind kind, std::shared_ptr<const Graph> observed, Partition partition)
    : kind_(kind), g_(std::move(observed)), p_(std::move(partition)) {
  const Graph& g = *g_;
  if (p_.size() != g.node_count()) throw InvalidArgument("partition does not cover the graph");
  stats_ = block_stats(g, p_);
  const auto n = g.node_count();

  switch (kind_) {
    case ScoreKind::BLOCK_DCSBM:
    case ScoreKind::DL_DELTA_DCSBM:
      theta_.assign(n, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        const auto kappa = stats_.degrees[p_[i]];
        if (kappa > 0) theta_[i] = static_cast<double>(stats_.node_degrees[i]) / static_cast<double>(kappa);
      }
      break;
    case ScoreKind::LOW_RANK: {
      factors_ = adjacency_top_eigenpairs(g, p_.community_count());
      if (static_cast<std::size_t>(factors_.values.size()) != p_.community_count()) {
        throw SolverError("low-rank factors unavailable");
      }
      scaled_ = factors_.vectors * factors_.values.asDiagonal();
      break;
    }
    case ScoreKind::MODULARITY_DELTA:
      for (std::size_t r = 0; r < stats_.k; ++r) {
        within_ += static_cast<double>(stats_.e(r, r));
        degree_sq_ += static_cast<double>(stats_.degrees[r]) * static_cast<double>(stats_.degrees[r]);
      }
      break;
    case ScoreKind::MAPEQ_DELTA: {
      std::size_t count = 0;
      comp_ = connected_components(g, &count);
      comps_.assign(count, {});
      for (std::size_t i = 0; i < n; ++i) {
        auto& c = comps_[comp_[i]];
        const auto d = static_cast<double>(g.degree(static_cast<NodeId>(i)));
        c.sums.deg_log += plogp2(d);
        c.modules[p_[i]].first += d;
      }
      for (const auto& e : g.edges()) {
        auto& c = comps_[comp_[e.u]];
        c.sums.edges += 1.0;
        if (p_[e.u] != p_[e.v]) {
          c.modules[p_[e.u]].second += 1.0;
          c.modules[p_[e.v]].second += 1.0;
        }
      }
      for (auto& c : comps_) {
        for (const auto& [label, vc] : c.modules) {
          c.sums.cut_sum += vc.second;
          c.sums.cut_log += plogp2(vc.second);
          c.sums.total_log += plogp2(vc.first + vc.second);
        }
        c.bits = map_bits(c.sums);
        weighted_bits_ += c.sums.edges * c.bits;
      }
      break;
    }
    default:
      break;
  }

  if (is_delta(kind_)) {
    baseline_ = objective_of(g);
  }
  if (kind_ == ScoreKind::MAPEQ_DELTA) {
    // removing a bridge splits a component; those few pairs are recomputed
    for (const auto& e : bridges(g)) {
      bridge_scores_.emplace(pair_key(e.u, e.v), score_full(e.u, e.v));
    }
  }
}

double ScoreModel::objective_of(const Graph& g) const {
  switch (kind_) {
    case ScoreKind::MODULARITY_DELTA:
      return detail::modularity_from(block_stats(g, p_), g.edge_count());
    case ScoreKind::DL_DELTA_SBM:
      return detail::description_length_from(block_stats(g, p_), g.node_count(), g.edge_count(),
                                             BlockModel::SBM);
    case ScoreKind::DL_DELTA_DCSBM:
      return detail::description_length_from(block_stats(g, p_), g.node_count(), g.edge_count(),
                                             BlockModel::DCSBM);
    case ScoreKind::MAPEQ_DELTA:
      return detail::map_equation_unchecked(g, p_);
    default:
      return 0.0;
  }
}

double ScoreModel::score(NodeId i, NodeId j) const {
  if (i == j) throw InvalidArgument("score of a self pair");
  if (i > j) std::swap(i, j);
  switch (kind_) {
    case ScoreKind::BLOCK_SBM: {
      const auto a = p_[i], b = p_[j];
      return (static_cast<double>(stats_.e(a, b)) + 1.0) /
             (static_cast<double>(stats_.capacity(a, b)) + 2.0);
    }
    case ScoreKind::BLOCK_DCSBM:
      return theta_[i] * theta_[j] * static_cast<double>(stats_.e(p_[i], p_[j]));
    case ScoreKind::LOW_RANK:
      return scaled_.row(i).dot(factors_.vectors.row(j));
    case ScoreKind::ADJACENCY:
      return g_->has_edge(i, j) ? 1.0 : 0.0;
    case ScoreKind::MODULARITY_DELTA:
      return modularity_delta(i, j, g_->has_edge(i, j));
    case ScoreKind::DL_DELTA_SBM:
    case ScoreKind::DL_DELTA_DCSBM:
      return dl_delta(i, j, g_->has_edge(i, j));
    case ScoreKind::MAPEQ_DELTA:
      return mapeq_delta(i, j, g_->has_edge(i, j));
  }
  return 0.0;
}

double ScoreModel::score_full(NodeId i, NodeId j) const {
  if (i == j) throw InvalidArgument("score of a self pair");
  if (!is_delta(kind_)) return score(i, j);
  const bool present = g_->has_edge(i, j);
  const Graph other = toggled(*g_, i, j, present);
  const double with = present ? baseline_ : objective_of(other);
  const double without = present ? objective_of(other) : baseline_;
  return kind_ == ScoreKind::MODULARITY_DELTA ? with - without : without - with;
}

double ScoreModel::modularity_delta(NodeId i, NodeId j, bool present) const {
  const auto a = p_[i], b = p_[j];
  const double m = static_cast<double>(g_->edge_count());
  auto q = [](double w, double s, double edges) {
    return edges > 0.0 ? w / edges - s / (4.0 * edges * edges) : 0.0;
  };
  const double step = present ? -1.0 : 1.0;
  const double da = static_cast<double>(stats_.degrees[a]);
  const double db = static_cast<double>(stats_.degrees[b]);
  double s2 = degree_sq_, w2 = within_;
  if (a == b) {
    s2 += (da + 2.0 * step) * (da + 2.0 * step) - da * da;
    w2 += step;
  } else {
    s2 += (da + step) * (da + step) - da * da + (db + step) * (db + step) - db * db;
  }
  const double base = q(within_, degree_sq_, m);
  const double changed = q(w2, s2, m + step);
  return present ? base - changed : changed - base;
}

double ScoreModel::dl_delta(NodeId i, NodeId j, bool present) const {
  const auto a = p_[i], b = p_[j];
  const auto k = stats_.k;
  const bool dc = kind_ == ScoreKind::DL_DELTA_DCSBM;
  const double e0 = static_cast<double>(stats_.e(a, b));
  const double cap = static_cast<double>(stats_.capacity(a, b));
  const double m0 = static_cast<double>(g_->edge_count());
  const double di0 = static_cast<double>(stats_.node_degrees[i]);
  const double dj0 = static_cast<double>(stats_.node_degrees[j]);
  const double ka0 = static_cast<double>(stats_.degrees[a]);
  const double kb0 = static_cast<double>(stats_.degrees[b]);

  // every term of the description length that depends on the pair (i, j)
  auto local = [&](double step) {
    const double m = m0 + step;
    const double pen_log_m = m > 0.0 ? std::log(m) : 0.0;
    double v = static_cast<double>(k * (k + 1)) / 2.0 * pen_log_m;
    if (!dc) return v + detail::sbm_pair_nll(e0 + step, cap);
    v += -xlogx(di0 + step) - xlogx(dj0 + step);
    if (a == b) {
      v += xlogx(ka0 + 2.0 * step);
    } else {
      v += xlogx(ka0 + step) + xlogx(kb0 + step);
    }
    v += detail::dcsbm_pair_nll(e0 + step, a == b) + m;
    return v;
  };
  // gain of having the edge: Obj(without) - Obj(with)
  return present ? local(-1.0) - local(0.0) : local(0.0) - local(1.0);
}

double ScoreModel::mapeq_delta(NodeId i, NodeId j, bool present) const {
  if (present) {
    auto it = bridge_scores_.find(pair_key(i, j));
    if (it != bridge_scores_.end()) return it->second;
  }
  const auto a = p_[i], b = p_[j];
  const auto ci = comp_[i], cj = comp_[j];
  const double step = present ? -1.0 : 1.0;
  const auto& c1 = comps_[ci];

  MapSums s = c1.sums;
  double removed = c1.sums.edges * c1.bits;
  auto module_of = [&](Label label) {
    std::pair<double, double> vc{0.0, 0.0};
    if (auto it = c1.modules.find(label); it != c1.modules.end()) vc = it->second;
    if (ci != cj) {
      const auto& c2 = comps_[cj];
      if (auto it = c2.modules.find(label); it != c2.modules.end()) {
        vc.first += it->second.first;
        vc.second += it->second.second;
      }
    }
    return vc;
  };

  if (ci != cj) {
    const auto& c2 = comps_[cj];
    removed += c2.sums.edges * c2.bits;
    s.edges += c2.sums.edges;
    s.deg_log += c2.sums.deg_log;
    s.cut_sum += c2.sums.cut_sum;
    s.cut_log += c2.sums.cut_log;
    s.total_log += c2.sums.total_log;
    const auto& small = c1.modules.size() <= c2.modules.size() ? c1.modules : c2.modules;
    const auto& large = c1.modules.size() <= c2.modules.size() ? c2.modules : c1.modules;
    for (const auto& [label, x] : small) {
      auto it = large.find(label);
      if (it == large.end()) continue;
      const auto& y = it->second;
      s.cut_log += plogp2(x.second + y.second) - plogp2(x.second) - plogp2(y.second);
      s.total_log += plogp2(x.first + y.first + x.second + y.second) - plogp2(x.first + x.second) -
                     plogp2(y.first + y.second);
    }
  }

  const double di = static_cast<double>(g_->degree(i));
  const double dj = static_cast<double>(g_->degree(j));
  s.edges += step;
  s.deg_log += plogp2(di + step) - plogp2(di) + plogp2(dj + step) - plogp2(dj);
  auto shift = [&](Label label, double dvol, double dcut) {
    const auto [vol, cut] = module_of(label);
    s.cut_sum += dcut;
    s.cut_log += plogp2(cut + dcut) - plogp2(cut);
    s.total_log += plogp2(vol + cut + dvol + dcut) - plogp2(vol + cut);
  };
  if (a == b) {
    shift(a, 2.0 * step, 0.0);
  } else {
    shift(a, step, step);
    shift(b, step, step);
  }

  const double m_base = static_cast<double>(g_->edge_count());
  const double m_new = m_base + step;
  const double bits_base = m_base > 0.0 ? weighted_bits_ / m_base : 0.0;
  const double weighted = weighted_bits_ - removed + s.edges * map_bits(s);
  const double bits_new = m_new > 0.0 ? weighted / m_new : 0.0;
  return present ? bits_new - bits_base : bits_base - bits_new;
}

ScoreModel build_score_model(MethodId method, const Graph& observed, const Partition& p,
                             ScoreMode mode) {
  return build_score_model(score_kind_for(method, mode), observed, p);
}

ScoreModel build_score_model(ScoreKind kind, const Graph& observed, const Partition& p) {
  return ScoreModel(kind, std::make_shared<const Graph>(observed), p);
}

double score_block_sbm(const ScoreModel& ctx, NodeId i, NodeId j) {
  if (ctx.kind() != ScoreKind::BLOCK_SBM) throw InvalidArgument("not a block SBM score model");
  return ctx.score(i, j);
}

double score_block_dcsbm(const ScoreModel& ctx, NodeId i, NodeId j) {
  if (ctx.kind() != ScoreKind::BLOCK_DCSBM) throw InvalidArgument("not a DC-SBM score model");
  return ctx.score(i, j);
}

double score_objective_delta(const ScoreModel& ctx, NodeId i, NodeId j) {
  if (!is_delta(ctx.kind())) throw InvalidArgument("not an objective-delta score model");
  return ctx.score(i, j);
}

double score_spectral_lowrank(const ScoreModel& ctx, NodeId i, NodeId j) {
  if (ctx.kind() != ScoreKind::LOW_RANK) throw InvalidArgument("not a low-rank score model");
  return ctx.score(i, j);
}

}  // namespace cfit
