#include "cfit/partition.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "cfit/error.hpp"
#include "cfit/graph.hpp"

namespace cfit {

namespace {

template <typename T>
std::pair<std::vector<Label>, std::size_t> relabel(std::span<const T> raw) {
  std::unordered_map<T, Label> seen;
  std::vector<Label> out;
  out.reserve(raw.size());
  for (const auto& x : raw) {
    auto [it, inserted] = seen.try_emplace(x, static_cast<Label>(seen.size()));
    out.push_back(it->second);
  }
  return {std::move(out), seen.size()};
}

// 0·ln0 == 0
double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

struct Contingency {
  std::vector<double> a;  // row sums
  std::vector<double> b;  // column sums
  std::unordered_map<std::int64_t, double> cells;
  double n = 0.0;
};

Contingency contingency(const Partition& p, const Partition& q) {
  Contingency c;
  c.a.assign(p.community_count(), 0.0);
  c.b.assign(q.community_count(), 0.0);
  const auto cols = static_cast<std::int64_t>(q.community_count());
  for (std::size_t i = 0; i < p.size(); ++i) {
    c.a[p[i]] += 1.0;
    c.b[q[i]] += 1.0;
    c.cells[p[i] * cols + q[i]] += 1.0;
  }
  c.n = static_cast<double>(p.size());
  return c;
}

double entropy(const std::vector<double>& counts, double n) {
  double h = 0.0;
  for (double x : counts) h -= xlogx(x / n);
  return h;
}

double mutual_information(const Contingency& c) {
  double mi = 0.0;
  const auto cols = static_cast<std::int64_t>(c.b.size());
  for (const auto& [key, nij] : c.cells) {
    double ai = c.a[key / cols];
    double bj = c.b[key % cols];
    mi += (nij / c.n) * std::log(c.n * nij / (ai * bj));
  }
  return mi;
}

// Expected mutual information under the hypergeometric (permutation) model.
double expected_mutual_information(const Contingency& c) {
  const double n = c.n;
  const double lg_n = std::lgamma(n + 1.0);
  double emi = 0.0;
  for (double ai : c.a) {
    for (double bj : c.b) {
      const double lo = std::max(1.0, ai + bj - n);
      const double hi = std::min(ai, bj);
      const double fixed = std::lgamma(ai + 1.0) + std::lgamma(bj + 1.0) +
                           std::lgamma(n - ai + 1.0) + std::lgamma(n - bj + 1.0) - lg_n;
      for (double nij = lo; nij <= hi; nij += 1.0) {
        const double log_p = fixed - std::lgamma(nij + 1.0) - std::lgamma(ai - nij + 1.0) -
                             std::lgamma(bj - nij + 1.0) - std::lgamma(n - ai - bj + nij + 1.0);
        emi += (nij / n) * std::log(n * nij / (ai * bj)) * std::exp(log_p);
      }
    }
  }
  return emi;
}

}  // namespace

Partition::Partition(std::span<const std::int64_t> raw) {
  auto [labels, k] = relabel(raw);
  labels_ = std::move(labels);
  k_ = k;
}

Partition::Partition(const std::vector<Label>& raw) {
  auto [labels, k] = relabel(std::span<const Label>(raw));
  labels_ = std::move(labels);
  k_ = k;
}

std::vector<std::size_t> Partition::community_sizes() const {
  std::vector<std::size_t> sizes(k_, 0);
  for (auto l : labels_) ++sizes[l];
  return sizes;
}

Partition canonicalize(std::span<const std::int64_t> raw, std::size_t expected_size) {
  if (expected_size != SIZE_MAX && raw.size() != expected_size) {
    throw InvalidArgument("labeling has " + std::to_string(raw.size()) + " entries, expected " +
                          std::to_string(expected_size));
  }
  return Partition(raw);
}

Partition canonicalize(const std::vector<Label>& raw, std::size_t expected_size) {
  if (expected_size != SIZE_MAX && raw.size() != expected_size) {
    throw InvalidArgument("labeling has " + std::to_string(raw.size()) + " entries, expected " +
                          std::to_string(expected_size));
  }
  return Partition(raw);
}

BlockStats block_stats(const Graph& g, const Partition& p) {
  if (p.size() != g.node_count()) throw InvalidArgument("partition does not cover the graph");
  BlockStats s;
  s.k = p.community_count();
  s.edges.assign(s.k * s.k, 0);
  s.sizes.assign(s.k, 0);
  s.degrees.assign(s.k, 0);
  s.node_degrees.assign(g.node_count(), 0);
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    const auto d = static_cast<std::int64_t>(g.degree(static_cast<NodeId>(i)));
    s.node_degrees[i] = d;
    s.sizes[p[i]] += 1;
    s.degrees[p[i]] += d;
  }
  for (const auto& e : g.edges()) {
    const auto r = static_cast<std::size_t>(p[e.u]);
    const auto t = static_cast<std::size_t>(p[e.v]);
    s.edges[r * s.k + t] += 1;
    if (r != t) s.edges[t * s.k + r] += 1;
  }
  return s;
}

double compare(const Partition& a, const Partition& b, Measure measure) {
  if (a.size() != b.size()) throw InvalidArgument("partitions have different sizes");
  if (a.size() == 0) throw InvalidArgument("empty partitions");
  if (a.community_count() == 1 && b.community_count() == 1) return 1.0;

  auto c = contingency(a, b);
  const double h = std::max(entropy(c.a, c.n), entropy(c.b, c.n));
  const double mi = mutual_information(c);
  if (measure == Measure::NMI) return h > 0.0 ? mi / h : 1.0;

  const double emi = expected_mutual_information(c);
  const double denom = h - emi;
  // Both labelings fixed under every permutation (e.g. all singletons).
  if (std::abs(denom) < 1e-12) return a == b ? 1.0 : 0.0;
  return (mi - emi) / denom;
}

std::string serialize_partition(const Graph& g, const Partition& p) {
  if (p.size() != g.node_count()) throw InvalidArgument("partition does not cover the graph");
  std::string out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    out += g.name(static_cast<NodeId>(i));
    out += ' ';
    out += std::to_string(p[i]);
    out += '\n';
  }
  return out;
}

}  // namespace cfit
