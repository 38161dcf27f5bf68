#include <doctest.h>

#include <cmath>
#include <random>

#include "eqalloc/error.hpp"
#include "eqalloc/objectives.hpp"
#include "oracles.hpp"

using namespace eqalloc;

namespace {

NeighborhoodGraph pair_graph() {
  const std::vector<Edge> edges{{0, 1}};
  return NeighborhoodGraph::from_edges(2, edges);
}

NeighborhoodGraph path3() {
  const std::vector<Edge> edges{{0, 1}, {1, 2}};
  return NeighborhoodGraph::from_edges(3, edges);
}

Profile rows(std::initializer_list<std::initializer_list<double>> r) {
  Profile P(static_cast<Eigen::Index>(r.size()), static_cast<Eigen::Index>(r.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& row : r) {
    Eigen::Index c = 0;
    for (double v : row) P(i, c++) = v;
    ++i;
  }
  return P;
}

Profile outcomes(const std::vector<Matrix>& maps, const Profile& u) { return predict_outcomes(maps, u); }

}  // namespace

TEST_SUITE("objectives") {

TEST_CASE("neqm examples") {
  CHECK(neqm(path3(), rows({{1.0}, {2.0}, {3.0}}), 1) == doctest::Approx(0.0));
  CHECK(neqm(pair_graph(), rows({{1.0, 2.0}, {0.0, 0.0}}), 0) == doctest::Approx(5.0));
  const Profile flat = Profile::Constant(3, 2, 4.0);
  for (std::size_t i = 0; i < 3; ++i) CHECK(neqm(path3(), flat, i) == 0.0);
}

TEST_CASE("wc-neqm examples") {
  CHECK(wc_neqm(pair_graph(), rows({{1.0, -3.0}, {0.0, 0.0}}), 0) == doctest::Approx(3.0));
  CHECK(wc_neqm(path3(), rows({{1.0}, {2.0}, {3.0}}), 1) == doctest::Approx(0.0));
  const Profile y = rows({{1.5}, {-2.0}, {0.25}});
  for (std::size_t i = 0; i < 3; ++i) CHECK(wc_neqm(path3(), y, i) == doctest::Approx(std::sqrt(neqm(path3(), y, i))));
}

TEST_CASE("equal allocation examples") {
  CHECK(equal_allocation_cost(Profile::Constant(4, 2, 1.5)) == 0.0);
  CHECK(equal_allocation_cost(rows({{0.0}, {1.0}})) == doctest::Approx(2.0));
  CHECK(equal_allocation_cost(rows({{0.0}, {0.0}, {3.0}})) == doctest::Approx(36.0));
}

TEST_CASE("dissatisfaction examples") {
  const auto g = path3();
  const Profile u = rows({{1.0}, {4.0}, {2.0}});
  const Profile y = rows({{0.5}, {3.0}, {1.0}});
  for (std::size_t i = 0; i < 3; ++i) CHECK(dissatisfaction(g, u, y, i, 0.0, 1.0) == doctest::Approx(neqm(g, y, i)));
  CHECK(dissatisfaction(path3(), rows({{1.0}, {2.0}, {3.0}}), y, 1, 1.0, 0.0) == doctest::Approx(0.0));
  const Profile u2 = rows({{1.0, 0.0}, {0.0, 0.0}});
  const Profile y2 = rows({{1.0, 0.0}, {0.0, 0.0}});
  CHECK(dissatisfaction(pair_graph(), u2, y2, 0, 1.0, 1.0) == doctest::Approx(2.0));
}

TEST_CASE("total cost examples") {
  const auto g = path3();
  const Profile u = rows({{1.0}, {4.0}, {2.0}});
  const Profile y = rows({{0.5}, {3.0}, {1.0}});
  CostSpec spec;
  double sum = 0.0;
  for (std::size_t i = 0; i < 3; ++i) sum += neqm(g, y, i);
  CHECK(total_cost(spec, g, u, y) == doctest::Approx(sum));

  spec.rho = 0.7;
  spec.sigma = 0.4;
  spec.omega_u = {1.0, 0.5, 0.2};
  spec.omega_y = {0.1, 0.3, 1.0};
  CHECK(total_cost(spec, g, Profile::Constant(3, 1, 2.0), Profile::Constant(3, 1, 9.0)) == 0.0);

  CostSpec pure;
  pure.rho = 1.0;
  pure.equity_weight = 0.0;
  CHECK(total_cost(pure, g, u, y) == doctest::Approx(equal_allocation_cost(u)));
}

TEST_CASE("definitions agree with the plain-loop oracles") {
  Rng rng(17);
  for (int t = 0; t < 50; ++t) {
    auto inst = oracle::random_instance(rng, 6, 3);
    const Profile y = outcomes(inst.maps, inst.u);
    for (std::size_t i = 0; i < inst.graph.size(); ++i)
      CHECK(neqm(inst.graph, y, i) == doctest::Approx(oracle::neqm_by_definition(inst.graph, y, i)).epsilon(1e-12));
    CHECK(equal_allocation_cost(inst.u) ==
          doctest::Approx(oracle::equal_allocation_by_definition(inst.u)).epsilon(1e-12));
  }
}

TEST_CASE("gradient examples") {
  SUBCASE("symmetric point is stationary") {
    const auto g = path3();
    std::vector<Matrix> maps(3, Matrix::Identity(2, 2));
    CostSpec spec;
    spec.rho = 0.5;
    spec.sigma = 0.5;
    spec.omega_u = {1.0, 1.0, 1.0};
    spec.omega_y = {1.0, 0.0, 1.0};
    CHECK(cost_gradient(spec, g, Profile::Constant(3, 2, 1.25), maps).norm() == 0.0);
  }
  SUBCASE("two communities with outcomes already equal") {
    std::vector<Matrix> maps{Matrix::Constant(1, 1, 1.0), Matrix::Constant(1, 1, 2.0)};
    const Profile grad = cost_gradient(CostSpec{}, pair_graph(), rows({{2.0}, {1.0}}), maps);
    CHECK(grad.norm() == 0.0);
  }
  SUBCASE("worst-case metric has no gradient") {
    CostSpec spec;
    spec.metric = Metric::WcNEqM;
    std::vector<Matrix> maps(2, Matrix::Identity(1, 1));
    try {
      cost_gradient(spec, pair_graph(), rows({{1.0}, {2.0}}), maps);
      FAIL("expected unsupported-metric");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::UnsupportedMetric);
    }
    CHECK_THROWS_AS(feedback_gradient(spec, pair_graph(), rows({{1.0}, {2.0}}), rows({{1.0}, {2.0}}), maps), Error);
  }
}

TEST_CASE("feedback gradient") {
  Rng rng(23);
  SUBCASE("model-consistent measurement equals the model gradient") {
    for (int t = 0; t < 20; ++t) {
      auto inst = oracle::random_instance(rng, 6, 3);
      const Profile y = outcomes(inst.maps, inst.u);
      const Profile a = cost_gradient(inst.spec, inst.graph, inst.u, inst.maps);
      const Profile b = feedback_gradient(inst.spec, inst.graph, inst.u, y, inst.maps);
      CHECK((a - b).norm() <= 1e-12 * (1.0 + a.norm()));
    }
  }
  SUBCASE("equal measurements give zero gradient") {
    auto inst = oracle::random_instance(rng, 6, 3);
    CostSpec spec;
    const Profile y = Profile::Constant(inst.u.rows(), inst.maps[0].rows(), 2.0);
    CHECK(feedback_gradient(spec, inst.graph, inst.u, y, inst.maps).norm() == 0.0);
  }
  SUBCASE("hand expansion on two scalar communities") {
    // sum_i psi_i = 2 (y1 - y2)^2, equal allocation = 2 (u1 - u2)^2
    const double G1 = 1.5, G2 = -0.75, rho = 0.3, w = 0.8;
    std::vector<Matrix> maps{Matrix::Constant(1, 1, G1), Matrix::Constant(1, 1, G2)};
    CostSpec spec;
    spec.rho = rho;
    spec.equity_weight = w;
    const Profile u = rows({{2.0}, {0.5}});
    const Profile y = rows({{3.1}, {-0.2}});
    const Profile grad = feedback_gradient(spec, pair_graph(), u, y, maps);
    const double dy = y(0, 0) - y(1, 0), du = u(0, 0) - u(1, 0);
    CHECK(grad(0, 0) == doctest::Approx(4.0 * w * G1 * dy + 4.0 * rho * du));
    CHECK(grad(1, 0) == doctest::Approx(-4.0 * w * G2 * dy - 4.0 * rho * du));
  }
}

TEST_CASE("gradient matches central differences") {
  Rng rng(31);
  for (int t = 0; t < 100; ++t) {
    auto inst = oracle::random_instance(rng, 6, 3);
    const Profile g = cost_gradient(inst.spec, inst.graph, inst.u, inst.maps);
    const Profile fd = oracle::fd_gradient(inst.spec, inst.graph, inst.u, inst.maps);
    CHECK((g - fd).norm() / std::max(g.norm(), 1.0) < 1e-6);
  }
}

TEST_CASE("properties on random inputs") {
  Rng rng(41);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int t = 0; t < 100; ++t) {
    auto inst = oracle::random_instance(rng, 6, 3);
    const Eigen::Index n = inst.u.rows(), m = inst.u.cols(), p = inst.maps[0].rows();
    const Profile y = outcomes(inst.maps, inst.u);

    const Vector shift = Vector::NullaryExpr(p, [&] { return 10.0 * normal(rng); });
    const Profile shifted = y.rowwise() + shift.transpose();
    CHECK(equitability_violation(inst.graph, shifted) ==
          doctest::Approx(equitability_violation(inst.graph, y)).epsilon(1e-9));

    for (std::size_t i = 0; i < inst.graph.size(); ++i) {
      const double q = neqm(inst.graph, y, i), w = wc_neqm(inst.graph, y, i);
      CHECK(q >= w * w / static_cast<double>(p) - 1e-12);
      CHECK(w <= std::sqrt(q) + 1e-12);
    }

    const Profile a = inst.u;
    const Profile b = Profile::NullaryExpr(n, m, [&] { return 5.0 * normal(rng); });
    const auto f = [&](const Profile& v) { return total_cost(inst.spec, inst.graph, v, outcomes(inst.maps, v)); };
    CHECK(f(0.5 * (a + b)) <= 0.5 * (f(a) + f(b)) + 1e-12 * (1.0 + f(a) + f(b)));
  }
}

TEST_CASE("weight validation") {
  CostSpec spec;
  spec.rho = -1.0;
  CHECK_THROWS_AS(spec.validate(2), Error);
  CostSpec omega;
  omega.omega_u = {0.5};
  CHECK_THROWS_AS(omega.validate(2), Error);
  omega.omega_u = {0.5, 1.5};
  CHECK_THROWS_AS(omega.validate(2), Error);
}

}  // TEST_SUITE
