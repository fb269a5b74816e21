#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cfit/bench.hpp"
#include "cfit/detect.hpp"
#include "cfit/partition.hpp"

namespace cfit {

// ---- k versus size -------------------------------------------------------

enum class SizeAxis { N, M };

struct KObservation {
  std::string network;
  MethodId method = MethodId::Q_LOUVAIN;
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::size_t k = 0;
};

struct KTrendBin {
  MethodId method = MethodId::Q_LOUVAIN;
  int bin = 0;           // x in [2^bin, 2^(bin+1))
  double center = 0.0;   // mean axis value of the networks in the bin
  double mean_k = 0.0;
  std::size_t max_k = 0;
  std::size_t count = 0;
  double reference = 0.0;  // sqrt(center)
};

// Factor-2 logarithmic bins over the axis; one row per (method, bin), sorted.
std::vector<KTrendBin> k_size_trend(const std::vector<KObservation>& observations, SizeAxis axis);

// ---- method similarity ---------------------------------------------------

inline constexpr double kDefaultKernelSigma2 = 0.3;

struct MergeStep {
  int left = 0;   // cluster ids: leaves are 0..n-1, merge t creates n + t
  int right = 0;
  double height = 0.0;  // average-linkage distance at the merge
};

struct SimilarityMatrix {
  std::vector<MethodId> methods;  // sorted by name
  Eigen::MatrixXd ami;
  Eigen::MatrixXd kernel;
  Eigen::MatrixXi pairs;  // networks that contributed to each entry
  std::vector<MergeStep> merges;
  std::vector<MethodId> leaf_order;
};

// network -> method -> partition
using PartitionTable = std::map<std::string, std::map<MethodId, Partition>>;

double ami_kernel(double ami, double sigma2 = kDefaultKernelSigma2);

SimilarityMatrix method_similarity(const PartitionTable& partitions,
                                   double sigma2 = kDefaultKernelSigma2);

// Average-linkage agglomeration on a symmetric distance matrix. Ties are
// broken by the lexicographically smallest member name of the clusters; the
// left child is the cluster holding the smaller name.
std::vector<MergeStep> average_linkage(const Eigen::MatrixXd& distance,
                                       const std::vector<std::string>& names,
                                       std::vector<int>* leaf_order = nullptr);

// ---- fit classification --------------------------------------------------

enum class FitLabel { WELL_FITTED, OVERFIT, UNDERFIT, UNEVEN, INCONCLUSIVE };
enum class Grade { GOOD, MODERATE, POOR };

std::string_view fit_label_name(FitLabel l);
std::string_view grade_name(Grade g);

struct FitEvidence {
  FitLabel label = FitLabel::INCONCLUSIVE;
  Grade lp = Grade::MODERATE;
  Grade ld = Grade::MODERATE;
  double lp_median_rank = 0.0;
  double ld_median_rank = 0.0;
  Grade lp_low = Grade::MODERATE;   // grade over the low-alpha half of the grid
  Grade lp_high = Grade::MODERATE;  // and over the high-alpha half
  double rank_shift = 0.0;          // median LP rank, high half minus low half
};

using FitDiagnosis = std::map<MethodId, FitEvidence>;

// One curve per method and task (ALPHA grids must match). Ranks are 1 = best
// AUC with average ranks for ties; a grade is the tercile of the median rank.
FitDiagnosis classify_fit(const std::vector<AccuracyCurve>& lp_curves,
                          const std::vector<AccuracyCurve>& ld_curves);

}  // namespace cfit
