#include <sstream>

#include "cfit/error.hpp"
#include "cfit/graph.hpp"
#include "cfit/partition.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace cfit;

namespace {

Graph parse(const std::string& text, LoadOptions opts = {}) {
  std::istringstream in(text);
  return load_edge_list(in, opts);
}

}  // namespace

TEST_SUITE("graph") {
  TEST_CASE("triangle") {
    const auto g = parse("0 1\n1 2\n2 0");
    CHECK(g.node_count() == 3);
    CHECK(g.edge_count() == 3);
  }

  TEST_CASE("simplify drops duplicates and self-loops") {
    const auto g = parse("0 1\n0 1\n1 1", {.simplify = true});
    CHECK(g.node_count() == 2);
    REQUIRE(g.edge_count() == 1);
    CHECK(g.edges()[0] == Edge{0, 1});
  }

  TEST_CASE("largest component of K3 plus an edge") {
    const auto g = parse("a b\nb c\nc a\nx y\n", {.simplify = true, .largest_component = true});
    CHECK(g.node_count() == 3);
    CHECK(g.edge_count() == 3);
    CHECK(g.names() == std::vector<std::string>{"a", "b", "c"});
  }

  TEST_CASE("largest component prefers the smallest node on ties") {
    std::vector<NodeId> kept;
    const auto g = largest_component(test::make_graph(4, {{2, 3}, {0, 1}}), &kept);
    CHECK(kept == std::vector<NodeId>{0, 1});
    CHECK(g.edge_count() == 1);
  }

  TEST_CASE("string ids, comments and blank lines") {
    const auto g = parse("# header\n\nalice bob\n  bob   carol  \n# tail\n");
    CHECK(g.node_count() == 3);
    CHECK(g.name(0) == "alice");
    CHECK(g.name(2) == "carol");
    CHECK(g.has_edge(1, 2));
    CHECK_FALSE(g.has_edge(0, 2));
  }

  TEST_CASE("empty input is an error") {
    CHECK_THROWS_AS(parse("# nothing\n"), EmptyGraphError);
    CHECK_THROWS_AS(parse("1 1\n", {.simplify = true}), EmptyGraphError);
  }

  TEST_CASE("malformed line reports its number") {
    try {
      parse("0 1\n1 2 3\n");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
    }
    CHECK_THROWS_AS(parse("0 1\n7\n"), ParseError);
  }

  TEST_CASE("unsimplified input with duplicates is rejected") {
    CHECK_THROWS_AS(parse("0 1\n1 0\n", {.simplify = false}), Error);
    CHECK_THROWS_AS(parse("0 0\n", {.simplify = false}), Error);
  }

  TEST_CASE("constructor validation") {
    CHECK_THROWS_AS(Graph(2, {{0, 0}}), InvalidArgument);
    CHECK_THROWS_AS(Graph(2, {{0, 2}}), InvalidArgument);
    CHECK_THROWS_AS(Graph(3, {{0, 1}, {0, 1}}), InvalidArgument);
  }

  TEST_CASE("serialization is sorted and round-trips") {
    const auto g = parse("5 3\n3 1\n1 5\n9 1\n");
    const auto text = serialize(g);
    CHECK(text == "0 1\n0 2\n1 2\n2 3\n");
    CHECK(parse(text) == g);
  }

  TEST_CASE("components are numbered by smallest node") {
    std::size_t count = 0;
    const auto comp = connected_components(test::make_graph(6, {{4, 5}, {0, 2}}), &count);
    CHECK(count == 4);
    CHECK(comp == std::vector<NodeId>{0, 1, 0, 2, 3, 3});
  }

  TEST_CASE("with_edges keeps the node set") {
    const auto g = test::complete(4);
    const auto h = g.with_edges({{0, 1}});
    CHECK(h.node_count() == 4);
    CHECK(h.edge_count() == 1);
    CHECK(h.degree(3) == 0);
  }
}

TEST_SUITE("generator") {
  TEST_CASE("planted partition is deterministic") {
    PlantedPartitionParams p{.nodes = 60, .group_prior = {0.5, 0.5}, .p_in = 0.3, .p_out = 0.05, .seed = 9};
    const auto a = generate_planted_partition(p);
    const auto b = generate_planted_partition(p);
    CHECK(a.graph == b.graph);
    CHECK(a.planted == b.planted);
    p.seed = 10;
    CHECK_FALSE(generate_planted_partition(p).graph == a.graph);
  }

  TEST_CASE("parameter validation") {
    PlantedPartitionParams p{.nodes = 10, .group_prior = {0.5, 0.4}, .p_in = 0.3, .p_out = 0.1};
    CHECK_THROWS_AS(generate_planted_partition(p), InvalidArgument);
    p.group_prior = {0.5, 0.5};
    p.p_in = 0.1;
    p.p_out = 0.3;
    CHECK_THROWS_AS(generate_planted_partition(p), InvalidArgument);
    p.allow_disassortative = true;
    CHECK_NOTHROW(generate_planted_partition(p));
    p.p_in = 1.5;
    CHECK_THROWS_AS(generate_planted_partition(p), InvalidArgument);
  }

  TEST_CASE("extreme probabilities") {
    PlantedPartitionParams p{.nodes = 20, .group_prior = {0.5, 0.5}, .p_in = 1.0, .p_out = 0.0, .seed = 3};
    const auto pg = generate_planted_partition(p);
    for (NodeId i = 0; i < 20; ++i) {
      for (NodeId j = i + 1; j < 20; ++j) {
        CHECK(pg.graph.has_edge(i, j) == (pg.planted[i] == pg.planted[j]));
      }
    }
  }
}

TEST_SUITE("partition") {
  TEST_CASE("canonicalize examples") {
    const auto a = canonicalize(std::vector<Label>{5, 5, 2, 2});
    CHECK(a.labels() == std::vector<Label>{0, 0, 1, 1});
    CHECK(a.community_count() == 2);
    const auto b = canonicalize(std::vector<Label>{0, 1, 2});
    CHECK(b.labels() == std::vector<Label>{0, 1, 2});
    CHECK(b.community_count() == 3);
    const auto c = canonicalize(std::vector<Label>{9});
    CHECK(c.labels() == std::vector<Label>{0});
    CHECK(c.community_count() == 1);
  }

  TEST_CASE("length mismatch") {
    CHECK_THROWS_AS(canonicalize(std::vector<Label>{0, 1}, 3), InvalidArgument);
  }

  TEST_CASE("block stats of the two-triangle graph") {
    const auto g = test::two_triangles();
    const auto s = block_stats(g, Partition(std::vector<Label>{0, 0, 0, 1, 1, 1}));
    CHECK(s.k == 2);
    CHECK(s.e(0, 0) == 3);
    CHECK(s.e(1, 1) == 3);
    CHECK(s.e(0, 1) == 1);
    CHECK(s.e(1, 0) == 1);
    CHECK(s.capacity(0, 0) == 3);
    CHECK(s.capacity(0, 1) == 9);
    CHECK(s.degrees == std::vector<std::int64_t>{7, 7});
    CHECK(s.sizes == std::vector<std::int64_t>{3, 3});
  }

  TEST_CASE("identical partitions") {
    const Partition p(std::vector<Label>{0, 0, 1, 1, 2, 2});
    CHECK(compare(p, p, Measure::AMI) == doctest::Approx(1.0));
    CHECK(compare(p, p, Measure::NMI) == doctest::Approx(1.0));
  }

  TEST_CASE("AMI against the term-by-term oracle") {
    const Partition a(std::vector<Label>{0, 0, 0, 1, 1, 1, 2, 2, 2, 2});
    const Partition b(std::vector<Label>{0, 0, 1, 1, 1, 2, 2, 2, 0, 2});
    CHECK(compare(a, b, Measure::AMI) == doctest::Approx(test::oracle_ami(a, b)).epsilon(1e-12));
  }

  TEST_CASE("trivial partitions") {
    const Partition one(std::vector<Label>{0, 0, 0, 0});
    CHECK(compare(one, one, Measure::AMI) == 1.0);
  }

  TEST_CASE("serialized partition uses original names") {
    std::istringstream in("x y\ny z\n");
    const auto g = load_edge_list(in);
    CHECK(serialize_partition(g, Partition(std::vector<Label>{0, 0, 1})) == "x 0\ny 0\nz 1\n");
  }
}
