#pragma once

#include <cmath>
#include <cstdint>

#include "cfit/graph.hpp"
#include "cfit/partition.hpp"

namespace cfit {

enum class BlockModel { SBM, DCSBM };

// Newman–Girvan modularity, Q = sum_c [e_c/M - (d_c/2M)^2].
// Throws UndefinedObjective when M == 0.
double modularity(const Graph& g, const Partition& p);

// Penalized negative log-likelihood in nats:
//   DL = -ln L_ML(G | P, model) + (k(k+1)/2) ln M + N ln k.
double description_length(const Graph& g, const Partition& p, BlockModel model);

// Log marginal likelihood of the Bernoulli SBM with uniform Beta priors on
// every block density plus the partition prior -ln N - N ln k.
double bayes_evidence(const Graph& g, const Partition& p);

// Two-level map equation in bits. Disconnected graphs are evaluated per
// component and combined with weights M_c / M; edgeless components carry no
// weight.
double map_equation(const Graph& g, const Partition& p);

double mdl_penalty(std::size_t k, std::size_t nodes, std::size_t edges);

namespace detail {

inline double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }
inline double plogp2(double x) { return x > 0.0 ? x * std::log2(x) : 0.0; }

// -[e ln(e/R) + (R-e) ln(1 - e/R)] with 0 ln 0 = 0
inline double sbm_pair_nll(double e, double capacity) {
  return xlogx(capacity) - xlogx(e) - xlogx(capacity - e);
}

// -ln B(e+1, R-e+1)
inline double beta_pair_nlz(double e, double capacity) {
  return std::lgamma(capacity + 2.0) - std::lgamma(e + 1.0) - std::lgamma(capacity - e + 1.0);
}

// Degree-corrected block term: -e ln e across groups, -e ln 2e within.
inline double dcsbm_pair_nll(double e, bool diagonal) {
  return diagonal ? -xlogx(2.0 * e) / 2.0 : -xlogx(e);
}

// The objectives evaluated directly from block statistics. They accept M = 0
// (returning the natural limit) so score functions can evaluate edge removals.
double description_length_from(const BlockStats& s, std::size_t nodes, std::size_t edges,
                               BlockModel model);
double neg_log_evidence_from(const BlockStats& s, std::size_t nodes);
double modularity_from(const BlockStats& s, std::size_t edges);
double map_equation_unchecked(const Graph& g, const Partition& p);

}  // namespace detail

}  // namespace cfit
