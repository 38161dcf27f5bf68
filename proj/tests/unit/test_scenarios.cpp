#include <doctest.h>

#include <cmath>
#include <random>

#include "eqalloc/config.hpp"
#include "eqalloc/error.hpp"
#include "eqalloc/scenarios.hpp"
#include "paths.hpp"

using namespace eqalloc;

namespace {

ScenarioConfig small_config(std::size_t horizon) {
  ScenarioConfig config;
  config.name = "small";
  const std::vector<double> G{2.0, 3.0, 5.0, 4.0};
  config.models = scalar_population(G, 0.5, 0.1, 99);
  config.initial_funding = (Profile(4, 1) << 4.0, 3.0, 1.0, 2.0).finished();
  for (std::size_t i = 0; i < config.models.size(); ++i) {
    const Vector u = config.initial_funding.row(static_cast<Eigen::Index>(i)).transpose();
    config.models[i].set_state(equilibrium_for(config.models[i], u).x_bar);
  }
  const std::vector<Edge> edges{{0, 1}, {1, 2}, {2, 3}, {3, 0}};
  config.graph = NeighborhoodGraph::from_edges(4, edges);
  config.budget_kind = BudgetKind::Exact;
  config.lower = config.initial_funding;
  config.schedule.s0 = config.initial_funding.colwise().sum().transpose();
  config.schedule.growth = Vector::Constant(1, 0.5);
  config.schedule.horizon = horizon;
  config.horizon = horizon;
  PolicyConfig dcl;
  dcl.kind = PolicyKind::DCL;
  PolicyConfig plus;
  plus.kind = PolicyKind::DCLPlus;
  config.policies = {PolicyConfig{}, dcl, plus};
  config.realizations = 3;
  config.seed = 5;
  config.noise.feedback_std = 0.01;
  config.noise.process_std = 0.01;
  config.estimate.source = EstimateSource::Perturbed;
  config.estimate.rel_std = 0.05;
  return config;
}

bool same_table(const RunTable& a, const RunTable& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t r = 0; r < a.size(); ++r) {
    if (a[r].realization != b[r].realization || a[r].policy != b[r].policy || a[r].period != b[r].period ||
        a[r].metric != b[r].metric || a[r].value != b[r].value)
      return false;
  }
  return true;
}

}  // namespace

TEST_SUITE("scenarios") {

TEST_CASE("budget schedule") {
  BudgetSchedule s{Vector::Constant(2, 10.0), (Vector(2) << 0.5, 0.25).finished(), 10};
  CHECK(s.at(0) == Vector::Constant(2, 10.0));
  CHECK(s.at(10)[0] == doctest::Approx(15.0));
  CHECK(s.at(10)[1] == doctest::Approx(12.5));
  CHECK(s.at(4)[0] == doctest::Approx(12.0));
  BudgetSchedule bad{Vector::Constant(2, 10.0), Vector::Constant(1, 0.5), 10};
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("linear drift of the static map") {
  DriftSpec drift{{Matrix::Constant(1, 1, 90.0)}, 10};
  CHECK(drifted_map(Matrix::Constant(1, 1, 60.0), drift.target_G[0], drift, 5)(0, 0) == doctest::Approx(75.0));

  const auto models = scalar_population(std::vector<double>{60.0}, 0.5, 0.1, 3);
  CHECK(drifted_model(models[0], drift, 0).C() == models[0].C());
  CHECK(static_maps(drifted_model(models[0], drift, 5)).G(0, 0) == doctest::Approx(75.0).epsilon(1e-12));
  CHECK(std::abs(static_maps(drifted_model(models[0], drift, 10)).G(0, 0) - 90.0) < 1e-10);
  CHECK(drifted_model(models[0], drift, 7).A() == models[0].A());
  CHECK_THROWS_AS(drifted_model(models[0], drift, 11), Error);

  const auto doc = read_json_file(testing_paths::source("data/malawi_nominal.json"));
  const auto nominal = models_from_json(doc).front();
  DriftSpec wide{{Matrix::Constant(2, 2, 3.0)}, 4};
  const Matrix G = static_maps(drifted_model(nominal, wide, 4)).G;
  CHECK((G - wide.target_G[0]).cwiseAbs().maxCoeff() < 1e-10);
  DriftSpec misshapen{{Matrix::Constant(1, 2, 3.0)}, 4};
  CHECK_THROWS_AS(drifted_model(nominal, misshapen, 2), Error);
}

TEST_CASE("population generation") {
  const auto doc = read_json_file(testing_paths::source("data/malawi_nominal.json"));
  const auto nominal = models_from_json(doc).front();
  SUBCASE("zero spread copies the nominal system") {
    const auto pop = generate_population(nominal, 5, CoeffStds{{"A11", 0.0}}, 1);
    for (const auto& m : pop) CHECK(m.A() == nominal.A());
  }
  SUBCASE("footnote spreads are reproducible and stable") {
    const CoeffStds stds{{"A11", 0.02}, {"A22", 0.05}, {"B21", 0.0025}, {"C12", 1.5e-5}, {"C21", 2.5e-4}};
    const auto a = generate_population(nominal, 25, stds, 11);
    const auto b = generate_population(nominal, 25, stds, 11);
    for (std::size_t i = 0; i < 25; ++i) {
      CHECK(a[i].A() == b[i].A());
      CHECK(a[i].C() == b[i].C());
      CHECK(spectral_radius(a[i].A()) < 1.0);
      CHECK(a[i].A()(0, 1) == nominal.A()(0, 1));
    }
  }
  SUBCASE("empirical spread matches the requested std") {
    const auto pop = generate_population(nominal, 10000, CoeffStds{{"A11", 0.02}}, 4);
    double mean = 0.0, sq = 0.0;
    for (const auto& m : pop) mean += m.A()(0, 0);
    mean /= 10000.0;
    for (const auto& m : pop) sq += (m.A()(0, 0) - mean) * (m.A()(0, 0) - mean);
    CHECK(std::sqrt(sq / 9999.0) == doctest::Approx(0.02).epsilon(0.1));
  }
  SUBCASE("impossible draws fail") {
    try {
      generate_population(nominal, 2, CoeffStds{{"A11", 1000.0}, {"A22", 1000.0}}, 0);
      FAIL("expected a generation error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Generation);
    }
    CHECK_THROWS_AS(generate_population(nominal, 2, CoeffStds{{"A31", 0.1}}, 0), Error);
  }
  SUBCASE("scalar replicate keeps the map exactly") {
    const std::vector<double> G{4.1, 16.9, 3.3};
    const auto pop = scalar_population(G, 0.5, 0.1, 20151985);
    for (std::size_t i = 0; i < G.size(); ++i) CHECK(static_maps(pop[i]).G(0, 0) == doctest::Approx(G[i]).epsilon(1e-12));
  }
}

TEST_CASE("zero horizon runs nothing") {
  auto config = small_config(0);
  config.schedule.growth.setZero();
  const auto result = run_scenario(config);
  REQUIRE(result.traces.size() == 3);
  for (const auto& per_policy : result.traces)
    for (const auto& trace : per_policy) CHECK(trace.periods.empty());
}

TEST_CASE("runs are deterministic and independent of threading") {
  auto config = small_config(6);
  config.threads = 1;
  const auto one = tabulate(run_scenario(config));
  config.threads = 3;
  const auto three = tabulate(run_scenario(config));
  const auto again = tabulate(run_scenario(config));
  CHECK(same_table(one, three));
  CHECK(same_table(three, again));
  config.seed = 6;
  CHECK_FALSE(same_table(one, tabulate(run_scenario(config))));
}

TEST_CASE("every recorded allocation is feasible and the baseline is shared") {
  auto config = small_config(8);
  const auto result = run_scenario(config);
  for (const auto& per_policy : result.traces) {
    for (const auto& trace : per_policy) {
      for (std::size_t k = 0; k < trace.periods.size(); ++k)
        CHECK(is_feasible(config.budget_at(k), trace.periods[k].u, 1e-8));
      CHECK(is_feasible(config.budget_at(config.horizon), trace.terminal.u, 1e-8));
      CHECK(trace.periods[0].equitability == per_policy[0].periods[0].equitability);
      CHECK(trace.periods[0].u == config.initial_funding);
    }
  }
  RunResult baseline = result;
  for (auto& per_policy : baseline.traces)
    for (auto& trace : per_policy) trace.terminal = trace.periods[0];
  for (std::size_t p = 0; p < 3; ++p) {
    CHECK(baseline.normalized_end(p, &PeriodMetrics::equitability) == 1.0);
    CHECK(baseline.normalized_end(p, &PeriodMetrics::equal_allocation) == 1.0);
  }
  const auto series = aggregate(tabulate(result));
  for (const auto& s : series) {
    CHECK(s.count == 3);
    CHECK(s.mean.size() == config.horizon + 1);
  }
}

TEST_CASE("SOL on the static nominal replicate reaches the offline optimum") {
  auto config = load_scenario(testing_paths::source("configs/nine_countries_s1.json"));
  config.policies = {PolicyConfig{}};
  const auto result = run_scenario(config);
  std::vector<Matrix> maps;
  for (const auto& m : config.models) maps.push_back(static_maps(m).G);
  const auto set = config.budget_at(config.horizon);
  const Profile best = sol_solve(config.graph, maps, config.cost, set, config.solver);
  const double offline = total_cost(config.cost, config.graph, best, predict_outcomes(maps, best));
  const Profile u = result.traces[0][0].terminal.u;
  const double achieved = total_cost(config.cost, config.graph, u, predict_outcomes(maps, u));
  CHECK(std::abs(achieved - offline) <= 1e-6 * std::max(1.0, offline));
}

TEST_CASE("frozen estimate error grows under drift") {
  auto config = load_scenario(testing_paths::source("configs/nine_countries_s4.json"));
  config.estimate.source = EstimateSource::Exact;
  config.estimate.rel_std = 0.0;
  config.realizations = 1;
  PolicyConfig dcl;
  dcl.kind = PolicyKind::DCL;
  config.policies = {dcl};
  const auto result = run_scenario(config);
  const auto& trace = result.traces[0][0];
  CHECK(trace.periods[0].map_error == 0.0);
  for (std::size_t k = 1; k < trace.periods.size(); ++k)
    CHECK(trace.periods[k].map_error >= trace.periods[k - 1].map_error);
  CHECK(trace.terminal.map_error >= trace.periods.back().map_error);
}

TEST_CASE("scenario validation") {
  auto config = small_config(4);
  config.cost.metric = Metric::WcNEqM;
  try {
    config.validate();
    FAIL("expected unsupported-metric");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnsupportedMetric);
  }
  auto isolated = small_config(4);
  isolated.graph = NeighborhoodGraph(4);
  CHECK_THROWS_AS(isolated.validate(), Error);
  auto no_runs = small_config(4);
  no_runs.realizations = 0;
  CHECK_THROWS_AS(no_runs.validate(), Error);
}

TEST_CASE("quadrants") {
  CHECK(classify(0.5, 0.5) == Quadrant::I);
  CHECK(classify(0.5, 2.0) == Quadrant::II);
  CHECK(classify(2.0, 2.0) == Quadrant::III);
  CHECK(classify(2.0, 0.5) == Quadrant::IV);
}

TEST_CASE("pareto endpoints on the district replicate") {
  auto config = load_scenario(testing_paths::source("configs/malawi_pareto.json"));
  const auto grid = sweep_from_json(read_json_file(testing_paths::source("configs/malawi_pareto.json")));
  const auto rows = pareto_sweep(config, grid.rho, grid.sigma);
  CHECK(rows.size() == grid.rho.size() * grid.sigma.size());
  for (double sigma : grid.sigma) {
    double at_one = 0.0;
    for (const auto& r : rows)
      if (r.sigma == sigma && r.rho == 1.0) at_one = r.equal_allocation_ratio;
    for (const auto& r : rows)
      if (r.sigma == sigma) CHECK(at_one <= r.equal_allocation_ratio);
  }
}

}  // TEST_SUITE
