#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace cfit {

class Graph;
using Label = std::int32_t;

// Hard assignment of nodes to communities with labels 0..k-1 numbered by
// first appearance.
class Partition {
 public:
  Partition() = default;

  // Canonicalizes any integer labeling.
  explicit Partition(std::span<const std::int64_t> raw);
  explicit Partition(const std::vector<Label>& raw);

  std::size_t size() const noexcept { return labels_.size(); }
  std::size_t community_count() const noexcept { return k_; }
  Label operator[](std::size_t i) const noexcept { return labels_[i]; }
  const std::vector<Label>& labels() const noexcept { return labels_; }
  std::vector<std::size_t> community_sizes() const;

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  std::vector<Label> labels_;
  std::size_t k_ = 0;
};

// Relabels to 0..k-1 by first appearance. Throws InvalidArgument when
// `expected_size` is given and does not match.
Partition canonicalize(std::span<const std::int64_t> raw, std::size_t expected_size = SIZE_MAX);
Partition canonicalize(const std::vector<Label>& raw, std::size_t expected_size = SIZE_MAX);

// Edge counts e_rs and pair capacities r_rs between communities.
struct BlockStats {
  std::size_t k = 0;
  std::vector<std::int64_t> edges;      // k*k symmetric, e_rr counts within-group edges once
  std::vector<std::int64_t> sizes;      // n_r
  std::vector<std::int64_t> degrees;    // d_r, total degree of group r
  std::vector<std::int64_t> node_degrees;

  std::int64_t e(std::size_t r, std::size_t s) const { return edges[r * k + s]; }
  std::int64_t capacity(std::size_t r, std::size_t s) const {
    return r == s ? sizes[r] * (sizes[r] - 1) / 2 : sizes[r] * sizes[s];
  }
};

BlockStats block_stats(const Graph& g, const Partition& p);

enum class Measure { AMI, NMI };

// Partition similarity. AMI uses the max(H1, H2) normalizer and the
// hypergeometric expectation of the mutual information. Returns 1 when both
// partitions are the single trivial community.
double compare(const Partition& a, const Partition& b, Measure measure);

// "node_id label" per line, using the graph's original node names.
std::string serialize_partition(const Graph& g, const Partition& p);

}  // namespace cfit
