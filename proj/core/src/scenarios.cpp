#include "eqalloc/scenarios.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <regex>
#include <string>
#include <thread>
#include <unordered_map>

#include "eqalloc/error.hpp"
#include "eqalloc/rng.hpp"

namespace eqalloc {
namespace {

constexpr int kRedrawCap = 100;

struct CoefficientRef {
  char matrix;
  Eigen::Index row;
  Eigen::Index col;
};

CoefficientRef parse_coefficient(const std::string& name) {
  // "A11" is row 1, col 1; multi-digit indices need a separator ("A10_2").
  static const std::regex compact(R"(^([ABC])(\d)(\d)$)");
  static const std::regex separated(R"(^([ABC])_?(\d+)[,_](\d+)$)");
  std::smatch match;
  if (std::regex_match(name, match, compact) || std::regex_match(name, match, separated))
    return {match[1].str()[0], std::stol(match[2]) - 1, std::stol(match[3]) - 1};
  throw Error(ErrorKind::InvalidInput, "coefficient name '" + name + "' is not of the form A11, B21 or A10_2");
}

double stddev_of(const Vector& v) {
  if (v.size() == 0) return 0.0;
  return std::sqrt((v.array() - v.mean()).square().mean());
}

double relative_map_error(std::span<const Matrix> estimates, std::span<const Matrix> truth) {
  double total = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const double scale = truth[i].norm();
    const double err = (estimates[i] - truth[i]).norm();
    total += scale > 0.0 ? err / scale : err;
  }
  return truth.empty() ? 0.0 : total / static_cast<double>(truth.size());
}

// Everything about a run that is shared by all realizations.
struct Prepared {
  std::vector<Matrix> true_G0;                  // static maps at period 0
  std::vector<std::vector<Matrix>> plant_C;     // [k][i], k = 0..K
  std::vector<std::vector<Matrix>> true_G;      // [k][i]
  std::vector<BudgetSet> budgets;               // [k], k = 0..K
  std::vector<Profile> reference;               // [k] when tracking
  std::vector<std::vector<IoRecord>> history;   // per community
};

Prepared prepare(const ScenarioConfig& config) {
  Prepared prep;
  const std::size_t n = config.communities();
  const std::size_t K = config.horizon;
  for (const auto& model : config.models) prep.true_G0.push_back(static_maps(model).G);

  prep.plant_C.resize(K + 1);
  prep.true_G.resize(K + 1);
  prep.budgets.reserve(K + 1);
  for (std::size_t k = 0; k <= K; ++k) {
    prep.budgets.push_back(config.budget_at(k));
    for (std::size_t i = 0; i < n; ++i) {
      if (config.drift && k > 0) {
        const std::size_t kd = std::min(k, config.drift->horizon);
        CommunityModel drifted = drifted_model(config.models[i], *config.drift, kd);
        prep.plant_C[k].push_back(drifted.C());
        prep.true_G[k].push_back(drifted_map(prep.true_G0[i], config.drift->target_G[i], *config.drift, kd));
      } else {
        prep.plant_C[k].push_back(config.models[i].C());
        prep.true_G[k].push_back(prep.true_G0[i]);
      }
    }
  }

  if (config.track_reference) {
    Profile start = default_start(prep.budgets[0], n);
    for (std::size_t k = 0; k <= K; ++k) {
      start = sol_solve(config.graph, prep.true_G[k], config.cost, prep.budgets[k], config.solver, start);
      prep.reference.push_back(start);
    }
  }

  if (config.estimate.source == EstimateSource::History) {
    prep.history.resize(n);
    for (const auto& rec : config.estimate.history) {
      if (rec.community >= n) throw Error(ErrorKind::Validation, "history names an unknown community");
      prep.history[rec.community].push_back(rec);
    }
  }
  return prep;
}

PeriodMetrics measure_period(const ScenarioConfig& config, const Prepared& prep, std::size_t k, const Profile& u,
                             const Profile& y_true, std::span<const Matrix> estimates) {
  PeriodMetrics pm;
  pm.u = u;
  pm.y = y_true;
  pm.equitability = equitability_violation(config.graph, y_true, config.cost.metric);
  pm.equal_allocation = equal_allocation_cost(u);
  pm.total_cost = total_cost(config.cost, config.graph, u, y_true);
  pm.map_error = relative_map_error(estimates, prep.true_G[k]);
  if (config.track_reference) pm.tracking_error = (u - prep.reference[k]).norm();
  pm.mean_outcome = y_true.colwise().mean().transpose();
  pm.outcome_std.resize(y_true.cols());
  for (Eigen::Index j = 0; j < y_true.cols(); ++j) pm.outcome_std[j] = stddev_of(y_true.col(j));
  return pm;
}

std::vector<LearnedMap> initial_estimates(const ScenarioConfig& config, const Prepared& prep, std::uint64_t rseed) {
  std::vector<LearnedMap> out;
  const std::size_t n = config.communities();
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Matrix base;
    switch (config.estimate.source) {
      case EstimateSource::Exact:
      case EstimateSource::Perturbed:
        base = prep.true_G0[i];
        break;
      case EstimateSource::History:
        if (prep.history[i].empty())
          throw Error(ErrorKind::NoData, "no history for community " + std::to_string(i));
        base = fit_linear(prep.history[i], config.estimate.window).G_hat;
        break;
    }
    LearnedMap learned;
    learned.estimate = perturb_estimate(base, config.estimate.source == EstimateSource::Exact ? 0.0
                                                                                                : config.estimate.rel_std,
                                        derive_seed({rseed, stream::kEstimate, i}));
    out.push_back(std::move(learned));
  }
  return out;
}

std::vector<PolicyTrace> run_realization(const ScenarioConfig& config, const Prepared& prep, std::size_t r) {
  const std::size_t n = config.communities();
  const std::size_t K = config.horizon;
  const std::uint64_t rseed = derive_seed({config.seed, stream::kRealization, r});
  const std::vector<LearnedMap> estimates0 = initial_estimates(config, prep, rseed);

  Profile warm;
  {
    std::vector<Matrix> maps;
    for (const auto& e : estimates0) maps.push_back(e.estimate.G_hat);
    warm = sol_solve(config.graph, maps, config.cost, prep.budgets[0], config.solver,
                     default_start(prep.budgets[0], n));
  }

  const Profile u_status_quo =
      config.initial_funding.size() != 0 ? config.initial_funding : Profile::Zero(static_cast<Eigen::Index>(n), warm.cols());
  const Eigen::Index p = prep.plant_C[0].front().rows();

  std::vector<PolicyTrace> traces;
  for (const auto& policy : config.policies) {
    PolicyTrace trace;
    trace.label = policy.label();
    trace.kind = policy.kind;

    std::vector<Vector> states;
    for (const auto& model : config.models) states.push_back(model.state());
    // Common random numbers: every policy sees the same noise streams.
    std::vector<Rng> feedback_rng;
    std::vector<Rng> process_rng;
    for (std::size_t i = 0; i < n; ++i) {
      feedback_rng.push_back(make_rng({rseed, stream::kFeedbackNoise, i, config.noise.seed}));
      process_rng.push_back(make_rng({rseed, stream::kProcessNoise, i, config.noise.seed}));
    }

    PolicyState state;
    state.estimates = estimates0;
    state.current_u = warm;
    state.applied_u = u_status_quo;

    Profile y_true(static_cast<Eigen::Index>(n), p);
    Profile y_meas(static_cast<Eigen::Index>(n), p);
    for (std::size_t k = 0; k <= K; ++k) {
      for (std::size_t i = 0; i < n; ++i) {
        const auto row = static_cast<Eigen::Index>(i);
        const Vector yt = prep.plant_C[k][i] * states[i];
        y_true.row(row) = yt.transpose();
        if (k < K) {
          const Vector r_noise = draw_normal(feedback_rng[i], p, config.noise.feedback_std);
          y_meas.row(row) = apply_feedback_noise(yt, r_noise, config.noise.feedback_mode).transpose();
        }
      }
      const auto maps = state.maps();
      PeriodMetrics pm = measure_period(config, prep, k, state.applied_u, y_true, maps);
      if (k == K) {
        trace.terminal = std::move(pm);
        break;
      }
      trace.periods.push_back(std::move(pm));

      const BudgetSet& next_set = prep.budgets[k + 1];
      switch (policy.kind) {
        case PolicyKind::SOL: {
          Profile next = sol_solve(config.graph, maps, config.cost, next_set, policy, state.current_u);
          state.current_u = next;
          state.applied_u = std::move(next);
          ++state.period;
          break;
        }
        case PolicyKind::DCL:
          state = dcl_step(std::move(state), y_meas, config.cost, config.graph, next_set, policy);
          break;
        case PolicyKind::DCLPlus:
          state = dclplus_step(std::move(state), y_meas, config.cost, config.graph, next_set, policy);
          break;
      }

      for (std::size_t i = 0; i < n; ++i) {
        const auto& model = config.models[i];
        Vector next = model.A() * states[i] + model.B() * state.applied_u.row(static_cast<Eigen::Index>(i)).transpose();
        next += draw_normal(process_rng[i], model.n(), config.noise.process_std);
        if (!next.allFinite()) throw Error(ErrorKind::Numerical, "non-finite welfare state");
        states[i] = std::move(next);
      }
    }
    traces.push_back(std::move(trace));
  }
  return traces;
}

}  // namespace

Vector BudgetSchedule::at(std::size_t k) const {
  if (horizon == 0) return s0;
  const double frac = static_cast<double>(k) / static_cast<double>(horizon);
  return s0.cwiseProduct((Vector::Ones(s0.size()) + growth * frac));
}

void BudgetSchedule::validate() const {
  if (s0.size() == 0) throw Error(ErrorKind::Validation, "budget s0 is empty");
  if (growth.size() != s0.size())
    throw Error(ErrorKind::Validation, "budget growth has length " + std::to_string(growth.size()) + ", s0 has " +
                                           std::to_string(s0.size()));
  if (!s0.allFinite() || s0.minCoeff() < 0.0) throw Error(ErrorKind::Validation, "budget s0 must be nonnegative");
  if (!growth.allFinite() || growth.minCoeff() < -1.0) throw Error(ErrorKind::Validation, "budget growth must be >= -1");
}

Matrix drifted_map(const Matrix& G0, const Matrix& target, const DriftSpec& drift, std::size_t k) {
  if (target.rows() != G0.rows() || target.cols() != G0.cols())
    throw Error(ErrorKind::InvalidInput, "drift target has the wrong shape");
  if (drift.horizon == 0) throw Error(ErrorKind::InvalidInput, "drift horizon must be positive");
  if (k > drift.horizon) throw Error(ErrorKind::InvalidInput, "period beyond the drift horizon");
  const double frac = static_cast<double>(k) / static_cast<double>(drift.horizon);
  return G0 + frac * (target - G0);
}

CommunityModel drifted_model(const CommunityModel& model, const DriftSpec& drift, std::size_t k) {
  if (model.id() >= drift.target_G.size()) throw Error(ErrorKind::InvalidInput, "drift has no target for community");
  const Matrix& target = drift.target_G[model.id()];
  const Matrix G0 = static_maps(model).G;
  const Matrix Gk = drifted_map(G0, target, drift, k);
  if (k == 0) return model;
  const auto n = model.n();
  Matrix I_minus_A = Matrix::Identity(n, n) - model.A();
  const Matrix M = I_minus_A.partialPivLu().solve(model.B());  // x_bar = M u_bar
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(M);
  if (cod.rank() < M.cols())
    throw Error(ErrorKind::InvalidInput, "drift needs (I - A)^-1 B to have full column rank");
  return model.with_output_matrix(Gk * cod.pseudoInverse());
}

std::vector<CommunityModel> generate_population(const CommunityModel& nominal, std::size_t n,
                                                const CoeffStds& coeff_stds, std::uint64_t seed) {
  if (spectral_radius(nominal.A()) >= 1.0 - CommunityModel::kStabilityMargin)
    throw Error(ErrorKind::Instability, "nominal model is unstable");
  std::vector<std::pair<CoefficientRef, double>> perturbations;
  for (const auto& [name, std_dev] : coeff_stds) {
    if (!(std_dev >= 0.0)) throw Error(ErrorKind::InvalidInput, "coefficient std must be nonnegative");
    auto ref = parse_coefficient(name);
    const Matrix& target = ref.matrix == 'A' ? nominal.A() : ref.matrix == 'B' ? nominal.B() : nominal.C();
    if (ref.row < 0 || ref.col < 0 || ref.row >= target.rows() || ref.col >= target.cols())
      throw Error(ErrorKind::InvalidInput, "coefficient " + name + " is outside the nominal matrix");
    perturbations.emplace_back(ref, std_dev);
  }

  std::vector<CommunityModel> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng = make_rng({seed, stream::kPopulation, i});
    bool done = false;
    for (int attempt = 0; attempt < kRedrawCap && !done; ++attempt) {
      Matrix A = nominal.A();
      Matrix B = nominal.B();
      Matrix C = nominal.C();
      for (const auto& [ref, std_dev] : perturbations) {
        const double delta = std_dev == 0.0 ? 0.0 : std::normal_distribution<double>(0.0, std_dev)(rng);
        Matrix& target = ref.matrix == 'A' ? A : ref.matrix == 'B' ? B : C;
        target(ref.row, ref.col) += delta;
      }
      if (spectral_radius(A) < 1.0 - CommunityModel::kStabilityMargin) {
        out.emplace_back(i, std::move(A), std::move(B), std::move(C), nominal.state());
        done = true;
      }
    }
    if (!done) throw Error(ErrorKind::Generation, "community " + std::to_string(i) + ": no stable draw in 100 attempts");
  }
  return out;
}

std::vector<CommunityModel> scalar_population(std::span<const double> G, double a_mean, double a_std,
                                             std::uint64_t seed) {
  std::vector<CommunityModel> out;
  out.reserve(G.size());
  for (std::size_t i = 0; i < G.size(); ++i) {
    Rng rng = make_rng({seed, stream::kPopulation, i});
    std::normal_distribution<double> eps(0.0, a_std > 0.0 ? a_std : 1.0);
    bool done = false;
    for (int attempt = 0; attempt < kRedrawCap && !done; ++attempt) {
      const double a = a_mean + (a_std > 0.0 ? eps(rng) : 0.0);
      if (std::abs(a) < 1.0 - CommunityModel::kStabilityMargin) {
        out.emplace_back(i, Matrix::Constant(1, 1, a), Matrix::Constant(1, 1, 1.0), Matrix::Constant(1, 1, G[i] * (1.0 - a)));
        done = true;
      }
    }
    if (!done) throw Error(ErrorKind::Generation, "community " + std::to_string(i) + ": no stable draw in 100 attempts");
  }
  return out;
}

BudgetSet ScenarioConfig::budget_at(std::size_t k) const {
  BudgetSet set;
  set.kind = budget_kind;
  set.s_max = schedule.at(k);
  set.lower = lower;
  return set;
}

void ScenarioConfig::set_rho(double rho) {
  cost.rho = rho;
  if (equity_weight_tracks_rho) cost.equity_weight = 1.0 - rho;
}

void ScenarioConfig::validate() const {
  const std::size_t n = communities();
  if (n == 0) throw Error(ErrorKind::Validation, "scenario has no communities");
  if (realizations < 1) throw Error(ErrorKind::Validation, "realizations must be >= 1");
  if (graph.size() != n)
    throw Error(ErrorKind::Validation, "graph has " + std::to_string(graph.size()) + " nodes for " +
                                           std::to_string(n) + " communities");
  for (std::size_t i = 0; i < n; ++i)
    if (graph.degree(i) == 0) throw Error(ErrorKind::Validation, "community " + std::to_string(i) + " has no neighbors");

  const Eigen::Index m = models.front().m();
  const Eigen::Index p = models.front().p();
  for (const auto& model : models)
    if (model.m() != m || model.p() != p)
      throw Error(ErrorKind::Validation, "community " + std::to_string(model.id()) + " has (m, p) = (" +
                                             std::to_string(model.m()) + ", " + std::to_string(model.p()) +
                                             "), expected (" + std::to_string(m) + ", " + std::to_string(p) + ")");
  if (initial_funding.size() != 0 &&
      (initial_funding.rows() != static_cast<Eigen::Index>(n) || initial_funding.cols() != m))
    throw Error(ErrorKind::Validation, "initial funding must be " + std::to_string(n) + "x" + std::to_string(m));
  if (initial_funding.size() != 0 && initial_funding.minCoeff() < 0.0)
    throw Error(ErrorKind::Validation, "initial funding must be nonnegative");

  cost.validate(n);
  schedule.validate();
  if (schedule.s0.size() != m)
    throw Error(ErrorKind::Validation, "budget has " + std::to_string(schedule.s0.size()) + " activities, models have " +
                                           std::to_string(m));
  for (std::size_t k : {std::size_t{0}, horizon}) budget_at(k).validate(n);

  if (policies.empty()) throw Error(ErrorKind::Validation, "no policies configured");
  std::vector<std::string> labels;
  for (const auto& policy : policies) {
    policy.validate();
    if (std::find(labels.begin(), labels.end(), policy.label()) != labels.end())
      throw Error(ErrorKind::Validation, "duplicate policy label " + policy.label());
    labels.push_back(policy.label());
    if (cost.metric != Metric::NEqM)
      throw Error(ErrorKind::UnsupportedMetric, "policy " + policy.label() + " needs the NEqM metric");
  }
  solver.validate();
  noise.validate();
  if (!(estimate.rel_std >= 0.0)) throw Error(ErrorKind::Validation, "estimate rel_std must be nonnegative");
  if (estimate.source == EstimateSource::History) {
    if (estimate.history.empty()) throw Error(ErrorKind::Validation, "history estimate source without records");
    for (const auto& rec : estimate.history) {
      if (rec.community >= n) throw Error(ErrorKind::Validation, "history names community " + std::to_string(rec.community));
      if (rec.u.size() != m || rec.y.size() != p)
        throw Error(ErrorKind::Validation, "history record dimensions do not match the models");
    }
  }
  if (drift) {
    if (drift->horizon == 0) throw Error(ErrorKind::Validation, "drift horizon must be positive");
    if (drift->target_G.size() != n) throw Error(ErrorKind::Validation, "drift needs one target per community");
    for (const auto& T : drift->target_G)
      if (T.rows() != p || T.cols() != m) throw Error(ErrorKind::Validation, "drift target must be p x m");
  }
}

double RunResult::normalized_end(std::size_t policy, double PeriodMetrics::*metric) const {
  double start = 0.0;
  double end = 0.0;
  for (const auto& per_policy : traces) {
    const auto& trace = per_policy.at(policy);
    start += trace.periods.empty() ? trace.terminal.*metric : trace.periods.front().*metric;
    end += trace.terminal.*metric;
  }
  if (start == 0.0) return end == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  return end / start;
}

std::vector<double> RunResult::terminal_values(std::size_t policy, double PeriodMetrics::*metric) const {
  std::vector<double> out;
  for (const auto& per_policy : traces) out.push_back(per_policy.at(policy).terminal.*metric);
  return out;
}

RunResult run_scenario(const ScenarioConfig& config) {
  config.validate();
  const Prepared prep = prepare(config);

  RunResult result;
  result.name = config.name;
  result.horizon = config.horizon;
  result.realizations = config.realizations;
  result.seed = config.seed;
  for (const auto& p : config.policies) result.policies.push_back(p.label());
  result.traces.resize(config.realizations);

  std::vector<std::exception_ptr> errors(config.realizations);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t r = next++; r < config.realizations; r = next++) {
      try {
        result.traces[r] = run_realization(config, prep, r);
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
  };
  std::size_t threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, config.realizations);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  for (std::size_t r = 0; r < errors.size(); ++r) {
    if (!errors[r]) continue;
    const std::string where = "realization " + std::to_string(r) + " (master seed " + std::to_string(config.seed) + ")";
    try {
      std::rethrow_exception(errors[r]);
    } catch (const Error& e) {
      throw Error(e.kind(), where + ": " + e.what());
    } catch (const std::exception& e) {
      throw Error(ErrorKind::Numerical, where + ": " + e.what());
    }
  }
  return result;
}

RunTable tabulate(const RunResult& result) {
  RunTable table;
  auto emit = [&](std::size_t r, const std::string& policy, std::size_t k, const PeriodMetrics& pm) {
    auto add = [&](std::string metric, double value) { table.push_back({r, policy, k, std::move(metric), value}); };
    add("equitability", pm.equitability);
    add("equal_allocation", pm.equal_allocation);
    add("total_cost", pm.total_cost);
    add("map_error", pm.map_error);
    if (pm.tracking_error) add("tracking_error", *pm.tracking_error);
    for (Eigen::Index j = 0; j < pm.mean_outcome.size(); ++j) {
      add("mean_outcome[" + std::to_string(j) + "]", pm.mean_outcome[j]);
      add("outcome_std[" + std::to_string(j) + "]", pm.outcome_std[j]);
    }
    for (Eigen::Index i = 0; i < pm.u.rows(); ++i)
      for (Eigen::Index a = 0; a < pm.u.cols(); ++a)
        add("u[" + std::to_string(i) + "][" + std::to_string(a) + "]", pm.u(i, a));
    for (Eigen::Index i = 0; i < pm.y.rows(); ++i)
      for (Eigen::Index j = 0; j < pm.y.cols(); ++j)
        add("y[" + std::to_string(i) + "][" + std::to_string(j) + "]", pm.y(i, j));
  };
  for (std::size_t r = 0; r < result.traces.size(); ++r) {
    for (const auto& trace : result.traces[r]) {
      for (std::size_t k = 0; k < trace.periods.size(); ++k) emit(r, trace.label, k, trace.periods[k]);
      emit(r, trace.label, trace.periods.size(), trace.terminal);
    }
  }
  return table;
}

std::vector<MetricSeries> aggregate(const RunTable& table) {
  struct Acc {
    std::vector<std::vector<double>> values;  // [period] -> samples in table order
  };
  std::vector<std::pair<std::string, std::string>> order;
  std::map<std::pair<std::string, std::string>, Acc> groups;
  for (const auto& row : table) {
    auto key = std::make_pair(row.policy, row.metric);
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) order.push_back(key);
    auto& values = it->second.values;
    if (values.size() <= row.period) values.resize(row.period + 1);
    values[row.period].push_back(row.value);
  }
  std::vector<MetricSeries> out;
  out.reserve(order.size());
  for (const auto& key : order) {
    const auto& values = groups.at(key).values;
    MetricSeries series;
    series.policy = key.first;
    series.metric = key.second;
    for (const auto& samples : values) {
      double sum = 0.0;
      for (double v : samples) sum += v;
      const double count = static_cast<double>(samples.size());
      const double mean = samples.empty() ? 0.0 : sum / count;
      double sq = 0.0;
      for (double v : samples) sq += (v - mean) * (v - mean);
      series.mean.push_back(mean);
      series.std.push_back(samples.size() > 1 ? std::sqrt(sq / (count - 1.0)) : 0.0);
      series.count = std::max(series.count, samples.size());
    }
    out.push_back(std::move(series));
  }
  return out;
}

namespace {

ScenarioConfig sol_only(ScenarioConfig config) {
  PolicyConfig sol = config.solver;
  for (const auto& p : config.policies) {
    if (p.kind == PolicyKind::SOL) {
      sol = p;
      break;
    }
  }
  sol.kind = PolicyKind::SOL;
  sol.name = "SOL";
  config.policies = {sol};
  return config;
}

}  // namespace

std::vector<RhoSweepRow> rho_sweep(ScenarioConfig config, std::span<const double> rho_values) {
  if (config.horizon == 0) throw Error(ErrorKind::Validation, "sweeps need a positive horizon");
  config = sol_only(std::move(config));
  std::vector<RhoSweepRow> rows;
  for (double rho : rho_values) {
    config.set_rho(rho);
    const RunResult result = run_scenario(config);
    RhoSweepRow row;
    row.rho = rho;
    row.equitability_ratio = result.normalized_end(0, &PeriodMetrics::equitability);
    row.equal_allocation_ratio = result.normalized_end(0, &PeriodMetrics::equal_allocation);
    for (const auto& per_policy : result.traces) {
      const auto& terminal = per_policy.front().terminal;
      if (row.mean_outcome.size() == 0) {
        row.mean_outcome = Vector::Zero(terminal.mean_outcome.size());
        row.outcome_std = Vector::Zero(terminal.outcome_std.size());
      }
      row.mean_outcome += terminal.mean_outcome;
      row.outcome_std += terminal.outcome_std;
    }
    row.mean_outcome /= static_cast<double>(result.traces.size());
    row.outcome_std /= static_cast<double>(result.traces.size());
    rows.push_back(std::move(row));
  }
  return rows;
}

const char* to_string(Quadrant q) noexcept {
  switch (q) {
    case Quadrant::I: return "I";
    case Quadrant::II: return "II";
    case Quadrant::III: return "III";
    case Quadrant::IV: return "IV";
  }
  return "?";
}

Quadrant classify(double equitability_ratio, double equal_allocation_ratio) noexcept {
  const bool eq_better = equitability_ratio < 1.0;
  const bool ea_better = equal_allocation_ratio < 1.0;
  if (eq_better && ea_better) return Quadrant::I;
  if (eq_better) return Quadrant::II;
  if (ea_better) return Quadrant::IV;
  return Quadrant::III;
}

std::vector<ParetoRow> pareto_sweep(ScenarioConfig config, std::span<const double> rho_values,
                                    std::span<const double> sigma_values) {
  if (config.horizon == 0) throw Error(ErrorKind::Validation, "sweeps need a positive horizon");
  config = sol_only(std::move(config));
  config.equity_weight_tracks_rho = true;
  std::vector<ParetoRow> rows;
  for (double sigma : sigma_values) {
    for (double rho : rho_values) {
      config.cost.sigma = sigma;
      config.set_rho(rho);
      const RunResult result = run_scenario(config);
      ParetoRow row;
      row.rho = rho;
      row.sigma = sigma;
      row.equitability_ratio = result.normalized_end(0, &PeriodMetrics::equitability);
      row.equal_allocation_ratio = result.normalized_end(0, &PeriodMetrics::equal_allocation);
      row.quadrant = classify(row.equitability_ratio, row.equal_allocation_ratio);
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace eqalloc
