#include <cmath>
#include <set>

#include "cfit/bench.hpp"
#include "cfit/error.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace cfit;
using doctest::Approx;

namespace {

TaskResult record(const std::string& net, MethodId m, Task t, double alpha, double auc, int rep = 0) {
  TaskResult r;
  r.network = net;
  r.method = m;
  r.task = t;
  r.alpha = alpha;
  r.auc = auc;
  r.replicate = rep;
  r.k = 1;
  return r;
}

}  // namespace

TEST_SUITE("bench") {
  TEST_CASE("observed edge count") {
    CHECK(observed_edge_count(10, 0.5) == 5);
    CHECK(observed_edge_count(10, 0.999) == 9);
    CHECK(observed_edge_count(10, 0.001) == 1);
    CHECK(observed_edge_count(10, 0.25) == 3);  // 2.5 rounds half up
    CHECK_THROWS_AS(observed_edge_count(1, 0.5), InvalidArgument);
    CHECK_THROWS_AS(observed_edge_count(10, 1.0), InvalidArgument);
  }

  TEST_CASE("split partitions the edge set") {
    const auto g = test::complete(6);
    const auto s = sample_edges(g, 0.4, 3);
    CHECK(s.observed.node_count() == 6);
    CHECK(s.observed_edges.size() == 6);
    CHECK(s.missing_edges.size() == 9);
    std::set<Edge> all(s.observed_edges.begin(), s.observed_edges.end());
    for (auto e : s.missing_edges) CHECK(all.insert(e).second);
    CHECK(all.size() == g.edge_count());
    CHECK(sample_edges(g, 0.4, 3).observed == s.observed);
  }

  TEST_CASE("split uniformity") {
    const auto g = test::make_graph(7, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 6}});
    std::vector<int> hits(6, 0);
    const int seeds = 10'000;
    for (int s = 0; s < seeds; ++s) {
      for (auto e : sample_edges(g, 0.5, static_cast<std::uint64_t>(s)).observed_edges) ++hits[e.u];
    }
    for (int h : hits) CHECK(h / static_cast<double>(seeds) == Approx(0.5).epsilon(0.04));
  }

  TEST_CASE("exact AUC fixtures") {
    CHECK(auc_exact(std::vector<double>{0.9, 0.8}, std::vector<double>{0.5, 0.7}) == 1.0);
    CHECK(auc_exact(std::vector<double>{0.5}, std::vector<double>{0.5}) == 0.5);
    CHECK(auc_exact(std::vector<double>{0.9, 0.4}, std::vector<double>{0.5, 0.1}) == 0.75);
    CHECK_THROWS_AS(auc_exact(std::vector<double>{}, std::vector<double>{0.5}), InvalidArgument);
  }

  TEST_CASE("Monte Carlo AUC fixtures") {
    const std::vector<double> pos{0.9, 0.8}, neg{0.5, 0.7};
    for (std::uint64_t s = 0; s < 5; ++s) CHECK(auc_monte_carlo(pos, neg, 100, s) == 1.0);
    const std::vector<double> p2{0.9, 0.4}, n2{0.5, 0.4};
    for (std::uint64_t s = 0; s < 20; ++s) {
      const double v = auc_monte_carlo(p2, n2, 1, s);
      CHECK((v == 0.0 || v == 0.5 || v == 1.0));
    }
    CHECK_THROWS_AS(auc_monte_carlo(pos, neg, 0, 1), InvalidArgument);
  }

  TEST_CASE("graph AUC draws negatives outside the excluded graph") {
    const auto g = test::two_triangles();
    const std::vector<Edge> positives{{0, 1}};
    const PairScorer score = [&](NodeId i, NodeId j) { return g.has_edge(i, j) ? 1.0 : 0.0; };
    CHECK(auc_monte_carlo(score, positives, g, 1000, 1) == 1.0);
    CHECK(auc_exact(score, positives, g) == 1.0);
  }

  TEST_CASE("adjacency scorer on a split") {
    PlantedPartitionParams pp{.nodes = 60, .group_prior = {0.5, 0.5}, .p_in = 0.3, .p_out = 0.05, .seed = 2};
    auto g = std::make_shared<const Graph>(generate_planted_partition(pp).graph);
    const auto split = sample_edges(*g, 0.5, 8);
    const PairScorer adj = [&](NodeId i, NodeId j) { return split.observed.has_edge(i, j) ? 1.0 : 0.0; };
    const BenchOptions exact{.exact = true};
    CHECK(evaluate_split(split, adj, Task::DESCRIPTION, exact, 1) == 1.0);
    CHECK(evaluate_split(split, adj, Task::PREDICTION, exact, 1) == 0.5);
  }

  TEST_CASE("task pair shares one split and one fit") {
    const auto g = test::cliques({6, 6}, true);
    const auto pair = run_task_pair(g, MethodId::MDL_SBM, 0.7, 5, ScoreMode::COMMON_SBM);
    CHECK(pair[0].task == Task::PREDICTION);
    CHECK(pair[1].task == Task::DESCRIPTION);
    CHECK(pair[0].k == pair[1].k);
    CHECK(pair[0].k >= 1);
    for (const auto& r : pair) {
      CHECK_FALSE(r.failed());
      CHECK(r.auc >= 0.0);
      CHECK(r.auc <= 1.0);
    }
    const auto again = run_task(g, MethodId::MDL_SBM, Task::DESCRIPTION, 0.7, 5, ScoreMode::COMMON_SBM);
    CHECK(again.auc == pair[1].auc);
  }

  TEST_CASE("summaries") {
    const std::vector<double> one{0.7};
    const auto p = summarize(0.3, one);
    CHECK(p.mean_auc == 0.7);
    CHECK(p.stderr_auc == 0.0);
    CHECK(p.count == 1);
    const std::vector<double> two{0.6, 0.8};
    const auto q = summarize(0.3, two);
    CHECK(q.mean_auc == Approx(0.7));
    CHECK(q.stderr_auc == Approx(0.1));
  }

  TEST_CASE("default grid") {
    const auto grid = default_alpha_grid();
    REQUIRE(grid.size() == 9);
    CHECK(grid.front() == Approx(0.1));
    CHECK(grid.back() == Approx(0.9));
  }

  TEST_CASE("accuracy curve") {
    const auto g = test::cliques({5, 5}, true);
    const auto c = accuracy_curve(g, MethodId::Q_LOUVAIN, Task::PREDICTION, {0.3, 0.6}, 2, 4,
                                  ScoreMode::MODEL_SPECIFIC);
    REQUIRE(c.points.size() == 2);
    CHECK(c.points[0].alpha < c.points[1].alpha);
    CHECK(c.points[0].count == 2);
    CHECK_THROWS_AS(accuracy_curve(g, MethodId::Q_LOUVAIN, Task::PREDICTION, {0.6, 0.3}, 1, 4,
                                   ScoreMode::MODEL_SPECIFIC),
                    InvalidArgument);
  }

  TEST_CASE("aggregate averages replicates, then networks") {
    std::vector<TaskResult> rs{
        record("a", MethodId::MDL_SBM, Task::PREDICTION, 0.5, 0.6, 0),
        record("a", MethodId::MDL_SBM, Task::PREDICTION, 0.5, 0.8, 1),
        record("b", MethodId::MDL_SBM, Task::PREDICTION, 0.5, 0.9, 0),
    };
    auto failed = record("b", MethodId::MDL_SBM, Task::PREDICTION, 0.5, 0.0, 1);
    failed.error = "solver";
    rs.push_back(failed);
    const auto curves = aggregate(rs, GroupBy::METHOD);
    REQUIRE(curves.size() == 1);
    REQUIRE(curves[0].points.size() == 1);
    CHECK(curves[0].points[0].mean_auc == Approx(0.8));
    CHECK(curves[0].points[0].count == 2);

    const auto by_domain = aggregate(rs, GroupBy::METHOD_DOMAIN, {{"a", "social"}, {"b", "biological"}});
    CHECK(by_domain.size() == 2);
    CHECK_THROWS_AS(aggregate(rs, GroupBy::METHOD_DOMAIN, {{"a", "social"}}), InvalidArgument);
  }

  TEST_CASE("single network corpus equals its accuracy curve") {
    std::vector<TaskResult> rs;
    for (int rep = 0; rep < 3; ++rep) rs.push_back(record("a", MethodId::MAPEQ, Task::DESCRIPTION, 0.2, 0.5 + 0.1 * rep, rep));
    const auto c = aggregate(rs, GroupBy::METHOD);
    CHECK(c[0].points[0].mean_auc == Approx(0.6));
  }

  TEST_CASE("empty groups are reported") {
    auto r = record("a", MethodId::MAPEQ, Task::DESCRIPTION, 0.2, 0.0);
    r.error = "failed";
    std::vector<std::string> warnings;
    CHECK(aggregate({r}, GroupBy::METHOD, {}, &warnings).empty());
    CHECK(warnings.size() == 1);
  }

  TEST_CASE("best fraction") {
    std::vector<TaskResult> rs;
    for (std::string net : {"a", "b", "c"}) {
      for (double alpha : {0.2, 0.4}) {
        rs.push_back(record(net, MethodId::Q_LOUVAIN, Task::PREDICTION, alpha, 0.9));
        rs.push_back(record(net, MethodId::MDL_SBM, Task::PREDICTION, alpha, 0.7));
        rs.push_back(record(net, MethodId::MAPEQ, Task::PREDICTION, alpha, net == "a" ? 0.88 : 0.5));
      }
    }
    const auto bf = best_fraction(rs);
    REQUIRE(bf.size() == 1);
    REQUIRE(bf[0].methods.size() == 3);
    std::map<MethodId, std::vector<double>> row;
    for (std::size_t m = 0; m < 3; ++m) row[bf[0].methods[m]] = bf[0].fraction[m];
    CHECK(row[MethodId::Q_LOUVAIN] == std::vector<double>{1.0, 1.0});
    CHECK(row[MethodId::MDL_SBM] == std::vector<double>{0.0, 0.0});
    CHECK(row[MethodId::MAPEQ][0] == Approx(1.0 / 3.0));
    CHECK(kDefaultBestTolerance == 0.05);
  }
}
