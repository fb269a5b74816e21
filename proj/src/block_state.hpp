#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "cfit/graph.hpp"

namespace cfit::detail {

// Quantity minimized by the agglomerative search.
enum class BlockObjective {
  SbmDescriptionLength,
  DcsbmDescriptionLength,
  NegLogEvidence,
};

// Mutable block bookkeeping for a partition under one of the block-model
// objectives. Group ids are stable slots 0..N-1; merged-away slots die.
//
// All deltas exclude the k-dependent global term, see global_term().
class BlockState {
 public:
  BlockState(const Graph& g, BlockObjective objective, const std::vector<Label>& labels);

  std::size_t group_count() const noexcept { return live_count_; }
  bool live(int r) const noexcept { return live_[r]; }
  const std::vector<int>& live_groups() const;
  int group_of(NodeId i) const noexcept { return group_[i]; }
  std::int64_t size_of(int r) const noexcept { return size_[r]; }

  // k-dependent part of the objective (MDL penalty or the partition prior).
  double global_term(std::size_t k) const;

  // Change of the objective (without global term) if s is merged into r.
  double merge_delta(int r, int s) const;
  void merge(int r, int s);

  // Node moves: call prepare_node(i) first, then query move_delta(b) for any
  // live b != group_of(i). Groups may not be emptied by a move.
  void prepare_node(NodeId i) const;
  const std::vector<int>& prepared_groups() const { return touched_; }
  double move_delta(int b) const;
  void move(NodeId i, int b);

  // Objective evaluated from scratch over the current block matrix.
  double value() const;

  std::vector<Label> labels() const;

  // Groups whose block rows changed since the last call.
  std::vector<int> take_dirty();
  void mark_dirty(int r);
  // Marks the groups whose merge deltas depend on node i having moved
  // between groups a and b.
  void mark_moved(NodeId i, int a, int b);

 private:
  double pair_term(double e, double cap, bool diag) const;
  double zero_term(double cap, bool diag) const { return pair_term(0.0, cap, diag); }
  double group_term(double kappa) const;
  // x ln x and ln x! for integer arguments, tabulated up to a bound
  double xl(std::int64_t x) const {
    return x < static_cast<std::int64_t>(xl_.size()) ? xl_[x] : static_cast<double>(x) * std::log(static_cast<double>(x));
  }
  double log_fact(std::int64_t x) const {
    return x < static_cast<std::int64_t>(lf_.size()) ? lf_[x] : std::lgamma(static_cast<double>(x) + 1.0);
  }
  static double capacity(std::int64_t a, std::int64_t b, bool diag) {
    return diag ? static_cast<double>(a) * static_cast<double>(a - 1) / 2.0
                : static_cast<double>(a) * static_cast<double>(b);
  }
  std::int32_t& e(int r, int s) { return e_[static_cast<std::size_t>(r) * n_ + s]; }
  std::int32_t e(int r, int s) const { return e_[static_cast<std::size_t>(r) * n_ + s]; }
  void add_block(int r, int s, int delta);
  void link(int r, int s);
  void compact(int r);
  void hist_add(std::int64_t size, int delta);

  const Graph& g_;
  BlockObjective obj_;
  std::size_t n_;
  std::vector<int> group_;
  std::vector<std::int32_t> e_;
  std::vector<std::int64_t> size_;
  std::vector<double> kappa_;
  std::vector<char> live_;
  std::vector<std::vector<int>> nbrs_;
  std::size_t live_count_ = 0;
  std::map<std::int64_t, int> size_hist_;
  double constant_ = 0.0;
  std::vector<double> xl_;
  std::vector<double> lf_;

  mutable std::vector<int> live_list_;
  mutable bool live_list_valid_ = false;
  std::vector<char> dirty_flag_;
  std::vector<int> dirty_;

  // scratch for queries
  mutable std::vector<int> stamp_;
  mutable int stamp_id_ = 0;
  mutable std::vector<int> node_count_;  // neighbors of the prepared node per group
  mutable std::vector<int> touched_;
  mutable NodeId prepared_ = -1;
};

struct BlockSearchOutcome {
  std::vector<Label> labels;
  double objective = 0.0;                           // minimized value at labels
  std::vector<std::pair<std::size_t, double>> trace;  // (k, objective) per level
};

// Greedy agglomeration from singletons: at every level the merge with the
// smallest objective change is applied, then Kernighan–Lin style node moves
// refine the level. Returns the best level seen.
BlockSearchOutcome agglomerative_block_search(const Graph& g, BlockObjective objective,
                                              std::uint64_t seed);

}  // namespace cfit::detail
