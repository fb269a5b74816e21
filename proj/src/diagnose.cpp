#include "cfit/diagnose.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <tuple>

#include "cfit/error.hpp"

namespace cfit {

std::vector<KTrendBin> k_size_trend(const std::vector<KObservation>& observations, SizeAxis axis) {
  struct Acc {
    double x_sum = 0.0;
    double k_sum = 0.0;
    std::size_t k_max = 0;
    std::size_t count = 0;
  };
  std::map<std::pair<std::string, int>, std::pair<MethodId, Acc>> bins;
  for (const auto& o : observations) {
    const auto x = axis == SizeAxis::N ? o.nodes : o.edges;
    if (x < 1) throw InvalidArgument("k trend needs positive network sizes");
    const int bin = static_cast<int>(std::floor(std::log2(static_cast<double>(x))));
    auto& [method, acc] = bins[{std::string(method_name(o.method)), bin}];
    method = o.method;
    acc.x_sum += static_cast<double>(x);
    acc.k_sum += static_cast<double>(o.k);
    acc.k_max = std::max(acc.k_max, o.k);
    ++acc.count;
  }
  std::vector<KTrendBin> out;
  for (const auto& [key, value] : bins) {
    const auto& [method, acc] = value;
    KTrendBin b;
    b.method = method;
    b.bin = key.second;
    b.count = acc.count;
    b.center = acc.x_sum / static_cast<double>(acc.count);
    b.mean_k = acc.k_sum / static_cast<double>(acc.count);
    b.max_k = acc.k_max;
    b.reference = std::sqrt(b.center);
    out.push_back(b);
  }
  return out;
}

double ami_kernel(double ami, double sigma2) {
  const double d = 1.0 - ami;
  return std::exp(-d * d / (2.0 * sigma2));
}

std::vector<MergeStep> average_linkage(const Eigen::MatrixXd& distance,
                                       const std::vector<std::string>& names,
                                       std::vector<int>* leaf_order) {
  const int n = static_cast<int>(names.size());
  if (distance.rows() != n || distance.cols() != n) throw InvalidArgument("distance matrix size mismatch");
  struct Cluster {
    int id;
    std::vector<int> members;  // sorted by name
    std::string min_name;
    int left = -1, right = -1;
  };
  std::vector<Cluster> all;
  std::vector<int> active;
  for (int i = 0; i < n; ++i) {
    all.push_back({i, {i}, names[i]});
    active.push_back(i);
  }
  auto link = [&](const Cluster& a, const Cluster& b) {
    double sum = 0.0;
    for (int x : a.members) {
      for (int y : b.members) sum += distance(x, y);
    }
    return sum / static_cast<double>(a.members.size() * b.members.size());
  };

  std::vector<MergeStep> merges;
  while (active.size() > 1) {
    int best_a = -1, best_b = -1;
    double best = std::numeric_limits<double>::infinity();
    std::pair<std::string, std::string> best_names;
    for (std::size_t x = 0; x < active.size(); ++x) {
      for (std::size_t y = x + 1; y < active.size(); ++y) {
        const auto& a = all[active[x]];
        const auto& b = all[active[y]];
        const double d = link(a, b);
        auto tie = std::minmax(a.min_name, b.min_name);
        const std::pair<std::string, std::string> tie_key{tie.first, tie.second};
        if (d < best || (d == best && tie_key < best_names)) {
          best = d;
          best_names = tie_key;
          best_a = active[x];
          best_b = active[y];
        }
      }
    }
    if (all[best_b].min_name < all[best_a].min_name) std::swap(best_a, best_b);
    Cluster merged;
    merged.id = static_cast<int>(all.size());
    merged.members = all[best_a].members;
    merged.members.insert(merged.members.end(), all[best_b].members.begin(), all[best_b].members.end());
    std::sort(merged.members.begin(), merged.members.end(),
              [&](int p, int q) { return names[p] < names[q]; });
    merged.min_name = all[best_a].min_name;
    merged.left = best_a;
    merged.right = best_b;
    merges.push_back({best_a, best_b, best});
    std::erase(active, best_a);
    std::erase(active, best_b);
    active.push_back(merged.id);
    all.push_back(std::move(merged));
  }

  if (leaf_order) {
    leaf_order->clear();
    std::vector<int> stack{active.empty() ? 0 : active.front()};
    while (!stack.empty()) {
      const int c = stack.back();
      stack.pop_back();
      if (all[c].left < 0) {
        leaf_order->push_back(c);
      } else {
        stack.push_back(all[c].right);
        stack.push_back(all[c].left);
      }
    }
  }
  return merges;
}

SimilarityMatrix method_similarity(const PartitionTable& partitions, double sigma2) {
  if (!(sigma2 > 0.0)) throw InvalidArgument("kernel parameter must be positive");
  std::set<MethodId> present;
  for (const auto& [network, by_method] : partitions) {
    for (const auto& [m, p] : by_method) present.insert(m);
  }
  if (present.size() < 2) throw InvalidArgument("method similarity needs at least two methods");

  SimilarityMatrix s;
  s.methods.assign(present.begin(), present.end());
  std::sort(s.methods.begin(), s.methods.end(),
            [](MethodId a, MethodId b) { return method_name(a) < method_name(b); });
  const auto n = static_cast<Eigen::Index>(s.methods.size());
  s.ami = Eigen::MatrixXd::Identity(n, n);
  s.kernel = Eigen::MatrixXd::Identity(n, n);
  s.pairs = Eigen::MatrixXi::Zero(n, n);

  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = a + 1; b < n; ++b) {
      double sum = 0.0;
      int count = 0;
      for (const auto& [network, by_method] : partitions) {
        auto pa = by_method.find(s.methods[a]);
        auto pb = by_method.find(s.methods[b]);
        if (pa == by_method.end() || pb == by_method.end()) continue;
        sum += compare(pa->second, pb->second, Measure::AMI);
        ++count;
      }
      if (count == 0) {
        throw InvalidArgument("no network has partitions for both " +
                              std::string(method_name(s.methods[a])) + " and " +
                              std::string(method_name(s.methods[b])));
      }
      const double mean = sum / count;
      s.ami(a, b) = s.ami(b, a) = mean;
      s.kernel(a, b) = s.kernel(b, a) = ami_kernel(mean, sigma2);
      s.pairs(a, b) = s.pairs(b, a) = count;
    }
    int own = 0;
    for (const auto& [network, by_method] : partitions) own += by_method.count(s.methods[a]) ? 1 : 0;
    s.pairs(a, a) = own;
  }

  std::vector<std::string> names;
  for (auto m : s.methods) names.emplace_back(method_name(m));
  const Eigen::MatrixXd distance = Eigen::MatrixXd::Ones(n, n) - s.kernel;
  std::vector<int> order;
  s.merges = average_linkage(distance, names, &order);
  for (int leaf : order) s.leaf_order.push_back(s.methods[leaf]);
  return s;
}

std::string_view fit_label_name(FitLabel l) {
  switch (l) {
    case FitLabel::WELL_FITTED:
      return "WELL_FITTED";
    case FitLabel::OVERFIT:
      return "OVERFIT";
    case FitLabel::UNDERFIT:
      return "UNDERFIT";
    case FitLabel::UNEVEN:
      return "UNEVEN";
    case FitLabel::INCONCLUSIVE:
      return "INCONCLUSIVE";
  }
  return "INCONCLUSIVE";
}

std::string_view grade_name(Grade g) {
  switch (g) {
    case Grade::GOOD:
      return "good";
    case Grade::MODERATE:
      return "moderate";
    case Grade::POOR:
      return "poor";
  }
  return "moderate";
}

namespace {

// method -> per-alpha mean AUC, checked for a common grid
std::map<MethodId, std::vector<double>> curve_table(const std::vector<AccuracyCurve>& curves,
                                                    std::vector<double>& grid) {
  std::map<MethodId, std::vector<double>> table;
  for (const auto& c : curves) {
    std::vector<double> alphas, values;
    for (const auto& p : c.points) {
      alphas.push_back(p.alpha);
      values.push_back(p.mean_auc);
    }
    if (grid.empty()) grid = alphas;
    if (alphas != grid) throw InvalidArgument("curves do not share an alpha grid");
    if (!table.emplace(c.method, std::move(values)).second) {
      throw InvalidArgument("duplicate curve for " + std::string(method_name(c.method)));
    }
  }
  return table;
}

// ranks[method][alpha]; 1 = highest AUC, ties share the average rank
std::map<MethodId, std::vector<double>> rank_table(const std::map<MethodId, std::vector<double>>& t,
                                                   std::size_t grid_size) {
  std::map<MethodId, std::vector<double>> ranks;
  for (const auto& [m, v] : t) ranks[m].resize(grid_size);
  for (std::size_t a = 0; a < grid_size; ++a) {
    for (const auto& [m, v] : t) {
      double higher = 0.0, equal = 0.0;
      for (const auto& [o, w] : t) {
        if (w[a] > v[a]) higher += 1.0;
        if (w[a] == v[a]) equal += 1.0;
      }
      ranks[m][a] = higher + (equal + 1.0) / 2.0;
    }
  }
  return ranks;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

Grade tercile(double rank, std::size_t methods) {
  const double t = (rank - 1.0) / static_cast<double>(methods);
  if (t < 1.0 / 3.0) return Grade::GOOD;
  if (t < 2.0 / 3.0) return Grade::MODERATE;
  return Grade::POOR;
}

}  // namespace

FitDiagnosis classify_fit(const std::vector<AccuracyCurve>& lp_curves,
                          const std::vector<AccuracyCurve>& ld_curves) {
  std::vector<double> grid;
  const auto lp = curve_table(lp_curves, grid);
  const auto ld = curve_table(ld_curves, grid);
  if (lp.size() < 3) throw InvalidArgument("fit classification needs at least three methods");
  if (lp.size() != ld.size()) throw InvalidArgument("prediction and description method sets differ");
  for (const auto& [m, v] : lp) {
    if (!ld.count(m)) throw InvalidArgument("no description curve for " + std::string(method_name(m)));
  }
  const auto n = lp.size();
  const auto lp_rank = rank_table(lp, grid.size());
  const auto ld_rank = rank_table(ld, grid.size());
  const std::size_t low_count = grid.size() / 2;

  FitDiagnosis out;
  for (const auto& [m, ranks] : lp_rank) {
    FitEvidence ev;
    ev.lp_median_rank = median(ranks);
    ev.ld_median_rank = median(ld_rank.at(m));
    ev.lp = tercile(ev.lp_median_rank, n);
    ev.ld = tercile(ev.ld_median_rank, n);
    if (low_count > 0) {
      const double low = median({ranks.begin(), ranks.begin() + static_cast<std::ptrdiff_t>(low_count)});
      const double high = median({ranks.begin() + static_cast<std::ptrdiff_t>(low_count), ranks.end()});
      ev.lp_low = tercile(low, n);
      ev.lp_high = tercile(high, n);
      ev.rank_shift = high - low;
    } else {
      ev.lp_low = ev.lp_high = ev.lp;
    }

    if (ev.lp_low != ev.lp_high) {
      ev.label = FitLabel::UNEVEN;
    } else if (ev.lp == Grade::GOOD && ev.ld != Grade::GOOD) {
      ev.label = FitLabel::WELL_FITTED;
    } else if (ev.lp == Grade::POOR && ev.ld == Grade::GOOD) {
      ev.label = FitLabel::OVERFIT;
    } else if (ev.lp == Grade::POOR && ev.ld == Grade::POOR) {
      ev.label = FitLabel::UNDERFIT;
    } else {
      ev.label = FitLabel::INCONCLUSIVE;
    }
    out[m] = ev;
  }
  return out;
}

}  // namespace cfit
