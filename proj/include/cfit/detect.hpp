#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cfit/graph.hpp"
#include "cfit/partition.hpp"

namespace cfit {

enum class MethodId {
  Q_LOUVAIN,
  MDL_SBM,
  MDL_DCSBM,
  BAYES_SBM,
  MAPEQ,
  SPECTRAL_BH,
  SPECTRAL_NB,
};

inline constexpr std::array<MethodId, 7> kAllMethods = {
    MethodId::Q_LOUVAIN, MethodId::MDL_SBM,     MethodId::MDL_DCSBM,  MethodId::BAYES_SBM,
    MethodId::MAPEQ,     MethodId::SPECTRAL_BH, MethodId::SPECTRAL_NB,
};

std::string_view method_name(MethodId m);
// Accepts the canonical upper-case names; throws InvalidArgument otherwise.
MethodId parse_method(std::string_view name);

struct DetectorResult {
  MethodId method = MethodId::Q_LOUVAIN;
  Partition partition;
  std::size_t k = 0;
  // Q_LOUVAIN: modularity. MDL_*: description length (nats). BAYES_SBM:
  // log-evidence. MAPEQ: code length (bits). SPECTRAL_*: k-means inertia.
  double objective = 0.0;
  std::uint64_t seed = 0;
  double ms = 0.0;
  std::vector<std::pair<std::size_t, double>> trace;  // (k, objective) per level, where recorded
  std::vector<std::string> warnings;
  std::optional<std::string> failure;  // set when the method could not produce a partition

  bool failed() const noexcept { return failure.has_value(); }
};

// Runs one method. Deterministic in (method, g, seed). Solver failures are
// reported through DetectorResult::failure; invalid input throws.
DetectorResult detect(MethodId method, const Graph& g, std::uint64_t seed);

// Upper bound on the spectral community count: min(N, 4 * ceil(sqrt(M))).
std::size_t spectral_k_cap(const Graph& g);

}  // namespace cfit
