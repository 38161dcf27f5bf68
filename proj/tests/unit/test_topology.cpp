#include <doctest.h>

#include <random>
#include <sstream>

#include "eqalloc/error.hpp"
#include "eqalloc/rng.hpp"
#include "eqalloc/topology.hpp"
#include "paths.hpp"

using namespace eqalloc;

namespace {

NeighborhoodGraph path3() {
  const std::vector<Edge> edges{{0, 1}, {1, 2}};
  return NeighborhoodGraph::from_edges(3, edges);
}

NeighborhoodGraph complete(std::size_t n) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) edges.emplace_back(i, j);
  return NeighborhoodGraph::from_edges(n, edges);
}

Profile column(std::initializer_list<double> v) {
  Profile p(static_cast<Eigen::Index>(v.size()), 1);
  Eigen::Index i = 0;
  for (double x : v) p(i++, 0) = x;
  return p;
}

void check_invariants(const NeighborhoodGraph& g) {
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK_FALSE(g.adjacent(i, i));
    CHECK(g.degree(i) >= 1);
    for (auto j : g.neighbors(i)) CHECK(g.adjacent(j, i));
  }
}

}  // namespace

TEST_SUITE("topology") {

TEST_CASE("neighbor mean examples") {
  const auto g = path3();
  const Profile v = column({1.0, 2.0, 3.0});
  CHECK(neighbor_mean(g, v, 1)[0] == doctest::Approx(2.0));
  CHECK(neighbor_mean(g, v, 2)[0] == doctest::Approx(2.0));
  CHECK(neighbor_mean(g, v, 0)[0] == doctest::Approx(2.0));
  CHECK(neighbor_mean(complete(3), column({0.0, 3.0, 6.0}), 0)[0] == doctest::Approx(4.5));
  CHECK(neighbor_mean(complete(3), column({0.0, 3.0, 6.0}), 1)[0] == doctest::Approx(3.0));
}

TEST_CASE("isolated node is an error") {
  NeighborhoodGraph g(3);
  g.add_edge(0, 1);
  try {
    neighbor_mean(g, column({1.0, 2.0, 3.0}), 2);
    FAIL("expected an isolated-node error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::IsolatedNode);
  }
}

TEST_CASE("edge construction rules") {
  const std::vector<Edge> dup{{0, 1}, {1, 0}, {0, 1}};
  CHECK(NeighborhoodGraph::from_edges(2, dup).edge_count() == 1);
  const std::vector<Edge> loop{{1, 1}};
  CHECK_THROWS_AS(NeighborhoodGraph::from_edges(2, loop), Error);
  const std::vector<Edge> out{{0, 5}};
  CHECK_THROWS_AS(NeighborhoodGraph::from_edges(2, out), Error);
}

TEST_CASE("random graph") {
  SUBCASE("two nodes always get their edge") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) CHECK(random_graph(2, 0.01, seed).adjacent(0, 1));
  }
  SUBCASE("fixed seed repeats") {
    CHECK(random_graph(25, 0.2, 77).edges() == random_graph(25, 0.2, 77).edges());
    CHECK(random_graph(25, 0.2, 77).edges() != random_graph(25, 0.2, 78).edges());
  }
  SUBCASE("invariants hold across seeds") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) check_invariants(random_graph(2 + seed % 30, 0.05, seed));
  }
  SUBCASE("bad arguments") {
    CHECK_THROWS_AS(random_graph(1, 0.5, 0), Error);
    CHECK_THROWS_AS(random_graph(5, 0.0, 0), Error);
  }
}

TEST_CASE("shipped nine-community edge list") {
  const auto g = load_edge_list(testing_paths::source("data/nine_countries.edges"), 9);
  CHECK(g.size() == 9);
  CHECK(g.edge_count() == 18);
  check_invariants(g);
  std::ostringstream out;
  write_edge_list(out, g);
  std::istringstream in(out.str());
  CHECK(read_edge_list(in, 9).edges() == g.edges());
}

TEST_CASE("edge list parsing") {
  std::istringstream in("# comment\n0 1\n1 2  # trailing\n\n");
  const auto g = read_edge_list(in);
  CHECK(g.size() == 3);
  CHECK(g.edge_count() == 2);
  std::istringstream bad("0 x\n");
  CHECK_THROWS_AS(read_edge_list(bad), Error);
}

TEST_CASE("neighbor mean is linear and fixes constants") {
  const auto g = random_graph(12, 0.3, 5);
  Rng rng(8);
  const Profile v = Profile::NullaryExpr(12, 2, [&] { return std::normal_distribution<double>()(rng); });
  const Profile w = Profile::NullaryExpr(12, 2, [&] { return std::normal_distribution<double>()(rng); });
  const Profile c = Profile::Constant(12, 2, 3.5);
  for (std::size_t i = 0; i < 12; ++i) {
    const Vector lhs = neighbor_mean(g, 2.0 * v - 0.5 * w, i);
    const Vector rhs = 2.0 * neighbor_mean(g, v, i) - 0.5 * neighbor_mean(g, w, i);
    CHECK((lhs - rhs).norm() < 1e-12);
    CHECK((neighbor_mean(g, c, i) - c.row(0).transpose()).norm() < 1e-14);
  }
}

}  // TEST_SUITE
