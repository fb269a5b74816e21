#include "block_state.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include "cfit/error.hpp"
#include "cfit/objectives.hpp"
#include "cfit/rng.hpp"

namespace cfit::detail {

namespace {
constexpr std::size_t kMaxNodes = 4096;  // dense block matrix: 64 MiB at this size
}

BlockState::BlockState(const Graph& g, BlockObjective objective, const std::vector<Label>& labels)
    : g_(g), obj_(objective), n_(g.node_count()) {
  if (n_ > kMaxNodes) {
    throw InvalidArgument("agglomerative block search supports at most " +
                          std::to_string(kMaxNodes) + " nodes");
  }
  if (labels.size() != n_) throw InvalidArgument("labels do not cover the graph");
  group_.assign(labels.begin(), labels.end());
  e_.assign(n_ * n_, 0);
  size_.assign(n_, 0);
  kappa_.assign(n_, 0.0);
  live_.assign(n_, false);
  nbrs_.assign(n_, {});
  dirty_flag_.assign(n_, false);
  stamp_.assign(n_, 0);
  constexpr std::size_t kTableLimit = std::size_t{1} << 22;
  const std::size_t table = std::min(kTableLimit, std::max(n_ * n_ / 2, 2 * g.edge_count()) + 4);
  xl_.resize(table);
  for (std::size_t x = 0; x < table; ++x) xl_[x] = xlogx(static_cast<double>(x));
  if (obj_ == BlockObjective::NegLogEvidence) {
    lf_.resize(table);
    for (std::size_t x = 0; x < table; ++x) lf_[x] = std::lgamma(static_cast<double>(x) + 1.0);
  }
  node_count_.assign(n_, 0);

  for (std::size_t i = 0; i < n_; ++i) {
    const int r = group_[i];
    if (r < 0 || static_cast<std::size_t>(r) >= n_) throw InvalidArgument("label out of range");
    if (!live_[r]) {
      live_[r] = true;
      ++live_count_;
    }
    ++size_[r];
    kappa_[r] += static_cast<double>(g.degree(static_cast<NodeId>(i)));
  }
  for (const auto& edge : g.edges()) add_block(group_[edge.u], group_[edge.v], +1);
  for (std::size_t r = 0; r < n_; ++r) {
    if (live_[r]) hist_add(size_[r], +1);
  }
  if (obj_ == BlockObjective::DcsbmDescriptionLength) {
    for (std::size_t i = 0; i < n_; ++i) {
      constant_ -= xlogx(static_cast<double>(g.degree(static_cast<NodeId>(i))));
    }
    constant_ += static_cast<double>(g.edge_count());
  }
  dirty_.clear();
  std::fill(dirty_flag_.begin(), dirty_flag_.end(), false);
}

double BlockState::pair_term(double e, double cap, bool diag) const {
  const auto ie = static_cast<std::int64_t>(e), ic = static_cast<std::int64_t>(cap);
  switch (obj_) {
    case BlockObjective::SbmDescriptionLength:
      return xl(ic) - xl(ie) - xl(ic - ie);
    case BlockObjective::DcsbmDescriptionLength:
      return diag ? -xl(2 * ie) / 2.0 : -xl(ie);
    case BlockObjective::NegLogEvidence:
      return log_fact(ic + 1) - log_fact(ie) - log_fact(ic - ie);
  }
  return 0.0;
}

double BlockState::group_term(double kappa) const {
  return obj_ == BlockObjective::DcsbmDescriptionLength ? xl(static_cast<std::int64_t>(kappa)) : 0.0;
}

double BlockState::global_term(std::size_t k) const {
  const double n = static_cast<double>(n_);
  if (obj_ == BlockObjective::NegLogEvidence) {
    return std::log(n) + n * std::log(static_cast<double>(k));
  }
  return mdl_penalty(k, n_, g_.edge_count());
}

const std::vector<int>& BlockState::live_groups() const {
  if (!live_list_valid_) {
    live_list_.clear();
    for (std::size_t r = 0; r < n_; ++r) {
      if (live_[r]) live_list_.push_back(static_cast<int>(r));
    }
    live_list_valid_ = true;
  }
  return live_list_;
}

void BlockState::mark_dirty(int r) {
  if (!dirty_flag_[r]) {
    dirty_flag_[r] = true;
    dirty_.push_back(r);
  }
}

std::vector<int> BlockState::take_dirty() {
  std::vector<int> out;
  out.swap(dirty_);
  for (int r : out) dirty_flag_[r] = false;
  return out;
}

void BlockState::mark_moved(NodeId i, int a, int b) {
  for (int r : {a, b}) {
    mark_dirty(r);
    for (int u : nbrs_[r]) mark_dirty(u);
  }
  for (NodeId j : g_.neighbors(i)) mark_dirty(group_[j]);
}

void BlockState::link(int r, int s) {
  nbrs_[r].push_back(s);
  nbrs_[s].push_back(r);
}

void BlockState::add_block(int r, int s, int delta) {
  if (r == s) {
    e(r, r) += delta;
  } else {
    const bool was_zero = e(r, s) == 0;
    e(r, s) += delta;
    e(s, r) += delta;
    if (was_zero && delta > 0) link(r, s);
  }
  mark_dirty(r);
  mark_dirty(s);
}

void BlockState::compact(int r) {
  auto& list = nbrs_[r];
  ++stamp_id_;
  std::size_t out = 0;
  for (int u : list) {
    if (u == r || !live_[u] || e(r, u) == 0 || stamp_[u] == stamp_id_) continue;
    stamp_[u] = stamp_id_;
    list[out++] = u;
  }
  list.resize(out);
}

void BlockState::hist_add(std::int64_t size, int delta) {
  auto it = size_hist_.find(size);
  if (it == size_hist_.end()) {
    size_hist_.emplace(size, delta);
  } else if ((it->second += delta) == 0) {
    size_hist_.erase(it);
  }
}

double BlockState::merge_delta(int r, int s) const {
  const auto nr = size_[r], ns = size_[s], nt = nr + ns;
  const double err = e(r, r), ess = e(s, s), ers = e(r, s);
  double d = pair_term(err + ess + ers, capacity(nt, nt, true), true) -
             pair_term(err, capacity(nr, nr, true), true) -
             pair_term(ess, capacity(ns, ns, true), true) -
             pair_term(ers, capacity(nr, ns, false), false);
  d += group_term(kappa_[r] + kappa_[s]) - group_term(kappa_[r]) - group_term(kappa_[s]);

  const bool zero_terms = obj_ == BlockObjective::NegLogEvidence;
  auto phi = [&](std::int64_t nu) {
    return zero_term(capacity(nt, nu, false), false) - zero_term(capacity(nr, nu, false), false) -
           zero_term(capacity(ns, nu, false), false);
  };
  double visited = 0.0;
  ++stamp_id_;
  stamp_[r] = stamp_[s] = stamp_id_;
  for (int src : {r, s}) {
    for (int u : nbrs_[src]) {
      if (stamp_[u] == stamp_id_ || !live_[u]) continue;
      const double eru = e(r, u), esu = e(s, u);
      if (eru == 0.0 && esu == 0.0) continue;
      stamp_[u] = stamp_id_;
      const auto nu = size_[u];
      d += pair_term(eru + esu, capacity(nt, nu, false), false) -
           pair_term(eru, capacity(nr, nu, false), false) -
           pair_term(esu, capacity(ns, nu, false), false);
      if (zero_terms) visited += phi(nu);
    }
  }
  if (zero_terms) {
    double all = 0.0;
    for (const auto& [sz, count] : size_hist_) all += count * phi(sz);
    d += all - phi(nr) - phi(ns) - visited;
  }
  return d;
}

void BlockState::merge(int r, int s) {
  if (r == s || !live_[r] || !live_[s]) throw InvalidArgument("invalid merge");
  hist_add(size_[r], -1);
  hist_add(size_[s], -1);

  e(r, r) += e(s, s) + e(r, s);
  e(r, s) = e(s, r) = 0;
  e(s, s) = 0;
  for (int u : nbrs_[s]) {
    if (u == r || u == s || !live_[u]) continue;
    const int esu = e(s, u);
    if (esu == 0) continue;
    const bool was_zero = e(r, u) == 0;
    e(r, u) += esu;
    e(u, r) += esu;
    e(s, u) = e(u, s) = 0;
    if (was_zero) link(r, u);
    mark_dirty(u);
  }
  nbrs_[s].clear();
  for (std::size_t i = 0; i < n_; ++i) {
    if (group_[i] == s) group_[i] = r;
  }
  size_[r] += size_[s];
  size_[s] = 0;
  kappa_[r] += kappa_[s];
  kappa_[s] = 0.0;
  live_[s] = false;
  --live_count_;
  live_list_valid_ = false;
  hist_add(size_[r], +1);
  compact(r);
  for (int u : nbrs_[r]) {
    if (nbrs_[u].size() > 2 * live_count_ + 16) compact(u);
  }
  mark_dirty(r);
  for (int u : nbrs_[r]) mark_dirty(u);
}

void BlockState::prepare_node(NodeId i) const {
  for (int u : touched_) node_count_[u] = 0;
  touched_.clear();
  for (NodeId j : g_.neighbors(i)) {
    const int u = group_[j];
    if (node_count_[u]++ == 0) touched_.push_back(u);
  }
  prepared_ = i;
}

double BlockState::move_delta(int b) const {
  const NodeId i = prepared_;
  const int a = group_[i];
  const auto na = size_[a], nb = size_[b];
  const auto na2 = na - 1, nb2 = nb + 1;
  const double di = static_cast<double>(g_.degree(i));
  const double ca = node_count_[a], cb = node_count_[b];
  const double eaa = e(a, a), ebb = e(b, b), eab = e(a, b);

  double d = pair_term(eaa - ca, capacity(na2, na2, true), true) -
             pair_term(eaa, capacity(na, na, true), true) +
             pair_term(ebb + cb, capacity(nb2, nb2, true), true) -
             pair_term(ebb, capacity(nb, nb, true), true) +
             pair_term(eab + ca - cb, capacity(na2, nb2, false), false) -
             pair_term(eab, capacity(na, nb, false), false);
  d += group_term(kappa_[a] - di) - group_term(kappa_[a]) + group_term(kappa_[b] + di) -
       group_term(kappa_[b]);

  const bool zero_terms = obj_ == BlockObjective::NegLogEvidence;
  auto psi = [&](std::int64_t nu) {
    return zero_term(capacity(na2, nu, false), false) - zero_term(capacity(na, nu, false), false) +
           zero_term(capacity(nb2, nu, false), false) - zero_term(capacity(nb, nu, false), false);
  };
  double visited = 0.0;
  ++stamp_id_;
  stamp_[a] = stamp_[b] = stamp_id_;
  auto visit = [&](int u) {
    if (stamp_[u] == stamp_id_ || !live_[u]) return;
    const double eau = e(a, u), ebu = e(b, u), cu = node_count_[u];
    if (eau == 0.0 && ebu == 0.0 && cu == 0.0) return;
    stamp_[u] = stamp_id_;
    const auto nu = size_[u];
    d += pair_term(eau - cu, capacity(na2, nu, false), false) -
         pair_term(eau, capacity(na, nu, false), false) +
         pair_term(ebu + cu, capacity(nb2, nu, false), false) -
         pair_term(ebu, capacity(nb, nu, false), false);
    if (zero_terms) visited += psi(nu);
  };
  for (int u : nbrs_[a]) visit(u);
  for (int u : nbrs_[b]) visit(u);
  for (int u : touched_) visit(u);
  if (zero_terms) {
    double all = 0.0;
    for (const auto& [sz, count] : size_hist_) all += count * psi(sz);
    d += all - psi(na) - psi(nb) - visited;
  }
  return d;
}

void BlockState::move(NodeId i, int b) {
  const int a = group_[i];
  if (a == b) return;
  if (size_[a] <= 1) throw InvalidArgument("move would empty a group");
  for (NodeId j : g_.neighbors(i)) {
    const int u = group_[j];
    add_block(a, u, -1);
    add_block(b, u, +1);
  }
  hist_add(size_[a], -1);
  hist_add(size_[b], -1);
  --size_[a];
  ++size_[b];
  hist_add(size_[a], +1);
  hist_add(size_[b], +1);
  const double di = static_cast<double>(g_.degree(i));
  kappa_[a] -= di;
  kappa_[b] += di;
  group_[i] = b;
  for (int r : {a, b}) {
    if (nbrs_[r].size() > 2 * live_count_ + 16) compact(r);
    // pair deltas of every neighbor depend on the sizes of a and b
    for (int u : nbrs_[r]) mark_dirty(u);
  }
  prepared_ = -1;
}

double BlockState::value() const {
  const auto& groups = live_groups();
  double v = constant_;
  for (std::size_t x = 0; x < groups.size(); ++x) {
    const int r = groups[x];
    v += group_term(kappa_[r]);
    v += pair_term(e(r, r), capacity(size_[r], size_[r], true), true);
    for (std::size_t y = x + 1; y < groups.size(); ++y) {
      const int s = groups[y];
      v += pair_term(e(r, s), capacity(size_[r], size_[s], false), false);
    }
  }
  return v + global_term(live_count_);
}

std::vector<Label> BlockState::labels() const { return Partition(group_).labels(); }

namespace {

class AgglomerativeSearch {
 public:
  AgglomerativeSearch(const Graph& g, BlockObjective objective, std::uint64_t seed)
      : g_(g), rng_(seed), state_(g, objective, singletons(g.node_count())) {}

  BlockSearchOutcome run() {
    BlockSearchOutcome out;
    const auto n = g_.node_count();
    best_delta_.assign(n, std::numeric_limits<double>::infinity());
    best_partner_.assign(n, -1);
    for (int r : state_.live_groups()) recompute_best(r);
    state_.take_dirty();

    double value = state_.value();
    out.trace.emplace_back(state_.group_count(), value);
    out.objective = value;
    out.labels = state_.labels();

    while (state_.group_count() > 1) {
      int r = -1;
      double best = std::numeric_limits<double>::infinity();
      for (int x : state_.live_groups()) {
        if (best_partner_[x] >= 0 && best_delta_[x] < best) {
          best = best_delta_[x];
          r = x;
        }
      }
      if (r < 0) break;
      int s = best_partner_[r];
      if (s < r) std::swap(r, s);
      const std::size_t k = state_.group_count();
      value += state_.merge_delta(r, s) + state_.global_term(k - 1) - state_.global_term(k);
      state_.merge(r, s);
      value += refine();

      update_partners();
      out.trace.emplace_back(state_.group_count(), value);
      if (value < out.objective - 1e-10) {
        out.objective = value;
        out.labels = state_.labels();
      }
    }
    return out;
  }

 private:
  static std::vector<Label> singletons(std::size_t n) {
    std::vector<Label> l(n);
    std::iota(l.begin(), l.end(), 0);
    return l;
  }

  void recompute_best(int x) {
    best_delta_[x] = std::numeric_limits<double>::infinity();
    best_partner_[x] = -1;
    for (int y : state_.live_groups()) {
      if (y == x) continue;
      const double d = state_.merge_delta(x, y);
      if (d < best_delta_[x] || (d == best_delta_[x] && y < best_partner_[x])) {
        best_delta_[x] = d;
        best_partner_[x] = y;
      }
    }
  }

  // After a merge or moves only pairs touching a dirty group change. Each
  // such pair is evaluated once and offered to both sides.
  void update_partners() {
    auto dirty = state_.take_dirty();
    std::erase_if(dirty, [&](int r) { return !state_.live(r); });
    std::sort(dirty.begin(), dirty.end());
    const auto n = g_.node_count();
    std::vector<char> is_dirty(n, 0), done(n, 0), stale(n, 0);
    for (int r : dirty) {
      is_dirty[r] = 1;
      best_delta_[r] = std::numeric_limits<double>::infinity();
      best_partner_[r] = -1;
    }
    const auto& live = state_.live_groups();
    for (int x : live) {
      if (is_dirty[x]) continue;
      const int p = best_partner_[x];
      if (p < 0 || !state_.live(p) || is_dirty[p]) stale[x] = 1;
    }
    auto offer = [&](int x, int y, double d) {
      if (d < best_delta_[x] || (d == best_delta_[x] && y < best_partner_[x])) {
        best_delta_[x] = d;
        best_partner_[x] = y;
      }
    };
    for (int x : dirty) {
      for (int y : live) {
        if (y == x || done[y]) continue;
        const double d = state_.merge_delta(x, y);
        offer(x, y, d);
        if (!stale[y]) offer(y, x, d);
      }
      done[x] = 1;
    }
    for (int x : live) {
      if (stale[x]) recompute_best(x);
    }
  }

  // Kernighan–Lin passes: every movable node is moved once to its best other
  // group (even uphill), then the pass is rolled back to its best prefix.
  // Returns the total objective change kept.
  double refine() {
    constexpr int kMaxPasses = 3;
    const std::size_t k = state_.group_count();
    if (k < 2) return 0.0;
    const bool all_groups = k <= 12;
    double kept = 0.0;
    // moves that are rolled back leave the state unchanged, so only kept
    // moves mark groups dirty
    const auto pending = state_.take_dirty();
    std::vector<std::array<int, 3>> kept_moves;
    std::vector<NodeId> order(g_.node_count());
    std::iota(order.begin(), order.end(), 0);

    for (int pass = 0; pass < kMaxPasses; ++pass) {
      std::shuffle(order.begin(), order.end(), rng_);
      struct Move {
        NodeId node;
        int from;
      };
      std::vector<Move> log;
      double running = 0.0, best_running = 0.0;
      std::size_t best_len = 0;
      for (NodeId i : order) {
        const int a = state_.group_of(i);
        if (state_.size_of(a) <= 1) continue;
        state_.prepare_node(i);
        int target = -1;
        double target_delta = std::numeric_limits<double>::infinity();
        auto consider = [&](int b) {
          if (b == a) return;
          const double d = state_.move_delta(b);
          if (d < target_delta - 1e-12) {
            target_delta = d;
            target = b;
          }
        };
        if (all_groups) {
          for (int b : state_.live_groups()) consider(b);
        } else {
          auto candidates = state_.prepared_groups();
          std::sort(candidates.begin(), candidates.end());
          for (int b : candidates) consider(b);
        }
        if (target < 0) continue;
        state_.move(i, target);
        log.push_back({i, a});
        running += target_delta;
        if (running < best_running - 1e-10) {
          best_running = running;
          best_len = log.size();
        }
      }
      for (std::size_t t = log.size(); t > best_len; --t) {
        state_.move(log[t - 1].node, log[t - 1].from);
      }
      for (std::size_t t = 0; t < best_len; ++t) {
        kept_moves.push_back({log[t].node, log[t].from, state_.group_of(log[t].node)});
      }
      kept += best_running;
      if (best_len == 0) break;
    }
    state_.take_dirty();
    for (int r : pending) state_.mark_dirty(r);
    for (const auto& [i, a, b] : kept_moves) state_.mark_moved(i, a, b);
    return kept;
  }

  const Graph& g_;
  Rng rng_;
  BlockState state_;
  std::vector<double> best_delta_;
  std::vector<int> best_partner_;
};

}  // namespace

BlockSearchOutcome agglomerative_block_search(const Graph& g, BlockObjective objective,
                                              std::uint64_t seed) {
  if (g.node_count() == 0) throw InvalidArgument("empty graph");
  AgglomerativeSearch search(g, objective, seed);
  return search.run();
}

}  // namespace cfit::detail
