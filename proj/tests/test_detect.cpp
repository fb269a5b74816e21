#include <cmath>
#include <numbers>

#include "block_state.hpp"
#include "cfit/detect.hpp"
#include "cfit/error.hpp"
#include "cfit/objectives.hpp"
#include "cfit/spectral.hpp"
#include "doctest.h"
#include "louvain.hpp"
#include "support.hpp"

using namespace cfit;
using doctest::Approx;

namespace {

const Partition kTriangles(std::vector<Label>{0, 0, 0, 1, 1, 1});

}  // namespace

TEST_SUITE("objectives") {
  TEST_CASE("modularity examples") {
    const auto g = test::two_triangles();
    CHECK(modularity(g, kTriangles) == Approx(5.0 / 14.0));
    CHECK(modularity(g, Partition(std::vector<Label>(6, 0))) == Approx(0.0));
    CHECK(modularity(test::complete(3), Partition(std::vector<Label>{0, 1, 2})) == Approx(-1.0 / 3.0));
    CHECK(modularity(g, kTriangles) == Approx(test::oracle_modularity(g, kTriangles)));
  }

  TEST_CASE("modularity needs an edge") {
    CHECK_THROWS_AS(modularity(Graph(3, {}), Partition(std::vector<Label>{0, 0, 1})), UndefinedObjective);
  }

  TEST_CASE("description length examples") {
    const auto k3k3 = test::cliques({3, 3}, false);
    const double two = description_length(k3k3, kTriangles, BlockModel::SBM);
    CHECK(two == Approx(3.0 * std::log(6.0) + 6.0 * std::log(2.0)));
    const double one = description_length(k3k3, Partition(std::vector<Label>(6, 0)), BlockModel::SBM);
    CHECK(one > two);
    CHECK(description_length(test::complete(3), Partition(std::vector<Label>(3, 0)), BlockModel::SBM) ==
          Approx(std::log(3.0)));
  }

  TEST_CASE("description length against the oracles") {
    const auto g = test::two_triangles();
    for (const auto& p : {kTriangles, Partition(std::vector<Label>{0, 1, 0, 1, 2, 2})}) {
      CHECK(description_length(g, p, BlockModel::SBM) == Approx(test::oracle_sbm_dl(g, p)).epsilon(1e-12));
      CHECK(description_length(g, p, BlockModel::DCSBM) == Approx(test::oracle_dcsbm_dl(g, p)).epsilon(1e-12));
    }
  }

  TEST_CASE("evidence examples") {
    const auto pair = test::make_graph(2, {{0, 1}});
    CHECK(bayes_evidence(pair, Partition(std::vector<Label>{0, 0})) ==
          Approx(std::log(0.5) - std::log(2.0)));
    // one block with e=0 and r=5: ln B(1, 6) = -ln 6 (the other blocks are fixed by the fixture)
    const auto g = test::make_graph(7, {{0, 1}});
    const Partition p(std::vector<Label>{0, 0, 1, 1, 1, 1, 1});
    // blocks: (0,0) e=1 r=1, (0,1) e=0 r=10, (1,1) e=0 r=10
    const double expected = std::log(0.5) - std::log(11.0) - std::log(11.0) - std::log(7.0) - 7.0 * std::log(2.0);
    CHECK(bayes_evidence(g, p) == Approx(expected));
    CHECK(std::lgamma(1.0) + std::lgamma(6.0) - std::lgamma(7.0) == Approx(-std::log(6.0)));
    CHECK(bayes_evidence(g, p) == Approx(test::oracle_bayes(g, p)));
  }

  TEST_CASE("map equation examples") {
    CHECK(map_equation(test::cycle(4), Partition(std::vector<Label>(4, 0))) == Approx(2.0));
    const auto k4k4 = test::cliques({4, 4}, false);
    CHECK(map_equation(k4k4, Partition(std::vector<Label>{0, 0, 0, 0, 1, 1, 1, 1})) == Approx(2.0));
    const auto g = test::two_triangles();
    CHECK(map_equation(g, kTriangles) == Approx(test::oracle_map_equation(g, kTriangles)));
    // single module: entropy of the degree distribution
    const auto s = test::star(3);
    const double h = -(0.5 * std::log2(0.5) + 3.0 * (1.0 / 6.0) * std::log2(1.0 / 6.0));
    CHECK(map_equation(s, Partition(std::vector<Label>(4, 0))) == Approx(h));
  }

  TEST_CASE("penalty") {
    CHECK(mdl_penalty(2, 6, 6) == Approx(3.0 * std::log(6.0) + 6.0 * std::log(2.0)));
    CHECK(mdl_penalty(1, 10, 1) == 0.0);
  }
}

TEST_SUITE("block_state") {
  TEST_CASE("merge and move deltas match recomputation") {
    Rng rng(17);
    for (auto obj : {detail::BlockObjective::SbmDescriptionLength, detail::BlockObjective::DcsbmDescriptionLength,
                     detail::BlockObjective::NegLogEvidence}) {
      for (int round = 0; round < 20; ++round) {
        const auto g = test::random_graph(rng, 8, 24, 2);
        const auto p = test::random_partition(rng, g.node_count(), 6);
        detail::BlockState st(g, obj, p.labels());
        const double before = st.value();
        const auto& groups = st.live_groups();
        if (groups.size() >= 2) {
          const int r = groups[0], s = groups[1];
          const auto k = st.group_count();
          const double d = st.merge_delta(r, s) + st.global_term(k - 1) - st.global_term(k);
          st.merge(r, s);
          CHECK(st.value() - before == Approx(d).epsilon(1e-9));
        }
        for (NodeId i = 0; i < static_cast<NodeId>(g.node_count()); ++i) {
          if (st.size_of(st.group_of(i)) < 2) continue;
          st.prepare_node(i);
          for (int b : st.live_groups()) {
            if (b == st.group_of(i)) continue;
            const double v0 = st.value();
            const double d = st.move_delta(b);
            st.move(i, b);
            CHECK(st.value() - v0 == Approx(d).epsilon(1e-9));
            break;
          }
        }
      }
    }
  }

  TEST_CASE("value matches the public objectives") {
    const auto g = test::two_triangles();
    detail::BlockState sbm(g, detail::BlockObjective::SbmDescriptionLength, kTriangles.labels());
    CHECK(sbm.value() == Approx(description_length(g, kTriangles, BlockModel::SBM)));
    detail::BlockState dc(g, detail::BlockObjective::DcsbmDescriptionLength, kTriangles.labels());
    CHECK(dc.value() == Approx(description_length(g, kTriangles, BlockModel::DCSBM)));
    detail::BlockState by(g, detail::BlockObjective::NegLogEvidence, kTriangles.labels());
    CHECK(-by.value() == Approx(bayes_evidence(g, kTriangles)));
  }
}

TEST_SUITE("spectral") {
  TEST_CASE("Bethe Hessian examples") {
    CHECK(bethe_hessian_select(test::complete(4)).k == 1);
    CHECK(bethe_hessian_select(test::cliques({4, 4}, false)).k == 2);
    const auto s = test::star(3);
    CHECK(mean_excess_degree(s) == Approx(1.0));
    CHECK(bethe_hessian_select(s).k == 1);
    const auto pm = test::make_graph(4, {{0, 1}, {2, 3}});
    CHECK(mean_excess_degree(pm) == Approx(0.0));
    CHECK(bethe_hessian_select(pm).k == 1);
  }

  TEST_CASE("K4 Bethe Hessian spectrum") {
    const double r = std::sqrt(2.0);
    const Eigen::MatrixXd h(bethe_hessian(test::complete(4), r));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    CHECK(es.eigenvalues()(0) == Approx(1.0 - 3.0 * r + 3.0));
    for (int i = 1; i < 4; ++i) CHECK(es.eigenvalues()(i) == Approx(1.0 + r + 3.0));
  }

  TEST_CASE("non-backtracking examples") {
    const auto two = nonbacktracking_select(test::cliques({4, 4}, false));
    CHECK(two.k == 2);
    CHECK(two.parameter == Approx(2.0));
    const auto c = nonbacktracking_select(test::cycle(10));
    CHECK(c.k == 1);
    CHECK(c.parameter == Approx(1.0));
  }

  TEST_CASE("cap limits the spectral count") {
    const auto g = test::cliques({4, 4, 4}, false);
    const auto sel = bethe_hessian_select(g, 2);
    CHECK(sel.k == 2);
    CHECK_FALSE(sel.warnings.empty());
  }

  TEST_CASE("Lanczos agrees with the dense solver") {
    Rng rng(5);
    const auto g = test::erdos_renyi(120, 0.08, rng);
    const auto a = adjacency_matrix(g);
    const auto l = lanczos_extreme(a, 4, Spectrum::Largest);
    const auto d = dense_extreme(Eigen::MatrixXd(a), 4, Spectrum::Largest);
    for (int i = 0; i < 4; ++i) CHECK(l.values(i) == Approx(d.values(i)).epsilon(1e-7));
  }

  TEST_CASE("k-means separates obvious clusters") {
    Eigen::MatrixXd x(6, 1);
    x << 0.0, 0.1, 0.2, 10.0, 10.1, 10.2;
    const auto km = kmeans(x, 2, 10, 1);
    CHECK(km.labels[0] == km.labels[2]);
    CHECK(km.labels[3] == km.labels[5]);
    CHECK(km.labels[0] != km.labels[3]);
    CHECK(km.inertia == Approx(0.04));
  }
}

TEST_SUITE("detect") {
  TEST_CASE("method names round-trip") {
    for (auto m : kAllMethods) CHECK(parse_method(method_name(m)) == m);
    CHECK_THROWS_AS(parse_method("INFOMAP"), InvalidArgument);
  }

  TEST_CASE("K5 bridge K5 splits in two") {
    const auto g = test::cliques({5, 5}, true);
    const Partition planted(std::vector<Label>{0, 0, 0, 0, 0, 1, 1, 1, 1, 1});
    for (auto m : kAllMethods) {
      if (m == MethodId::MDL_DCSBM) continue;
      CAPTURE(method_name(m));
      const auto r = detect(m, g, 3);
      REQUIRE_FALSE(r.failed());
      CHECK(r.k == 2);
      CHECK(compare(r.partition, planted, Measure::AMI) == Approx(1.0));
    }
  }

  TEST_CASE("degree-corrected MDL keeps K5 bridge K5 whole") {
    // The degree-corrected likelihood gains about 4.4 nats from the split
    // while the penalty grows by 2 ln M + N ln 2, so one block is optimal.
    const auto g = test::cliques({5, 5}, true);
    const Partition planted(std::vector<Label>{0, 0, 0, 0, 0, 1, 1, 1, 1, 1});
    const Partition whole(std::vector<Label>(10, 0));
    CHECK(description_length(g, whole, BlockModel::DCSBM) < description_length(g, planted, BlockModel::DCSBM));
    const auto r = detect(MethodId::MDL_DCSBM, g, 3);
    CHECK(r.k == 1);
    CHECK(r.objective == Approx(description_length(g, whole, BlockModel::DCSBM)));
  }

  TEST_CASE("the planted split is the best two-way split") {
    // brute force over every two-partition of K5-bridge-K5
    const auto g = test::cliques({5, 5}, true);
    const Partition planted(std::vector<Label>{0, 0, 0, 0, 0, 1, 1, 1, 1, 1});
    double best_q = -1.0, best_dl = 1e300;
    Partition arg_q, arg_dl;
    for (int mask = 1; mask < (1 << 9); ++mask) {
      std::vector<Label> lab(10, 0);
      for (int i = 0; i < 9; ++i) lab[i + 1] = (mask >> i) & 1;
      const Partition p(lab);
      const double q = modularity(g, p), dl = description_length(g, p, BlockModel::SBM);
      if (q > best_q) best_q = q, arg_q = p;
      if (dl < best_dl) best_dl = dl, arg_dl = p;
    }
    CHECK(arg_q == planted);
    CHECK(arg_dl == planted);
    CHECK(detect(MethodId::Q_LOUVAIN, g, 1).objective == Approx(best_q));
    CHECK(detect(MethodId::MDL_SBM, g, 1).objective == Approx(best_dl));
  }

  TEST_CASE("objective is the method's own objective") {
    const auto g = test::cliques({4, 4, 4}, true);
    for (auto m : kAllMethods) {
      const auto r = detect(m, g, 11);
      CAPTURE(method_name(m));
      REQUIRE_FALSE(r.failed());
      CHECK(r.k == r.partition.community_count());
      CHECK(std::isfinite(r.objective));
      switch (m) {
        case MethodId::Q_LOUVAIN:
          CHECK(r.objective == Approx(modularity(g, r.partition)));
          break;
        case MethodId::MDL_SBM:
          CHECK(r.objective == Approx(description_length(g, r.partition, BlockModel::SBM)));
          break;
        case MethodId::MDL_DCSBM:
          CHECK(r.objective == Approx(description_length(g, r.partition, BlockModel::DCSBM)));
          break;
        case MethodId::BAYES_SBM:
          CHECK(r.objective == Approx(bayes_evidence(g, r.partition)));
          break;
        case MethodId::MAPEQ:
          CHECK(r.objective == Approx(map_equation(g, r.partition)));
          break;
        default:
          CHECK(r.objective >= 0.0);
      }
    }
  }

  TEST_CASE("star graph") {
    const auto g = test::star(20);
    CHECK(detect(MethodId::MDL_SBM, g, 1).k <= 2);
    CHECK(detect(MethodId::Q_LOUVAIN, g, 1).objective >= 0.0);
    // the two symmetric candidates: a single block, or hub versus leaves
    const double one = description_length(g, Partition(std::vector<Label>(21, 0)), BlockModel::SBM);
    std::vector<Label> hub(21, 1);
    hub[0] = 0;
    const double two = description_length(g, Partition(hub), BlockModel::SBM);
    CHECK(detect(MethodId::MDL_SBM, g, 1).objective <= std::min(one, two) + 1e-9);
  }

  TEST_CASE("determinism") {
    Rng rng(3);
    const auto g = test::erdos_renyi(40, 0.15, rng);
    for (auto m : kAllMethods) {
      CAPTURE(method_name(m));
      CHECK(detect(m, g, 8).partition == detect(m, g, 8).partition);
    }
  }

  TEST_CASE("spectral cap") {
    CHECK(spectral_k_cap(test::complete(4)) == 4);
    CHECK(spectral_k_cap(test::make_graph(30, {{0, 1}})) == 4);
  }

  TEST_CASE("edgeless input is rejected") {
    CHECK_THROWS_AS(detect(MethodId::Q_LOUVAIN, Graph(3, {}), 1), InvalidArgument);
  }

  TEST_CASE("agglomerative trace contains the reported level") {
    const auto g = test::cliques({4, 4, 4}, true);
    const auto out = detail::agglomerative_block_search(g, detail::BlockObjective::SbmDescriptionLength, 1);
    REQUIRE_FALSE(out.trace.empty());
    double best = 1e300;
    for (auto [k, v] : out.trace) best = std::min(best, v);
    CHECK(out.objective == Approx(best));
  }

  TEST_CASE("Louvain levels never decrease modularity") {
    Rng rng(21);
    for (int t = 0; t < 10; ++t) {
      const auto g = test::random_graph(rng, 20, 60, 5);
      const auto out = detail::louvain(g, detail::LocalObjective::Modularity, t);
      std::vector<Label> single(g.node_count());
      for (std::size_t i = 0; i < single.size(); ++i) single[i] = static_cast<Label>(i);
      double prev = modularity(g, Partition(single));
      for (double q : out.level_objective) {
        CHECK(q >= prev - 1e-12);
        prev = q;
      }
    }
  }
}
