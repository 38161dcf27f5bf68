#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eqalloc/dynamics.hpp"
#include "eqalloc/estimation.hpp"
#include "eqalloc/feasible_set.hpp"
#include "eqalloc/objectives.hpp"
#include "eqalloc/policies.hpp"
#include "eqalloc/topology.hpp"

namespace eqalloc {

/// s(k) = s0 .* (1 + growth * k / K).
struct BudgetSchedule {
  Vector s0;
  Vector growth;
  std::size_t horizon = 0;

  Vector at(std::size_t k) const;
  void validate() const;
};

/// Linear drift of every community's static map towards a target,
/// reached at period `horizon`.
struct DriftSpec {
  std::vector<Matrix> target_G;
  std::size_t horizon = 0;
};

/// Copy of `model` whose output matrix realizes
/// G(k) = G(0) + (k / K) (target - G(0)); A, B and the state are unchanged.
CommunityModel drifted_model(const CommunityModel& model, const DriftSpec& drift, std::size_t k);
Matrix drifted_map(const Matrix& G0, const Matrix& target, const DriftSpec& drift, std::size_t k);

/// Coefficient name ("A11", "B21", "C12"; 1-based row and column) to the
/// standard deviation of its additive Gaussian perturbation.
using CoeffStds = std::map<std::string, double>;

std::vector<CommunityModel> generate_population(const CommunityModel& nominal, std::size_t n,
                                                const CoeffStds& coeff_stds, std::uint64_t seed);

/// Scalar communities with B = 1, A = a_mean + N(0, a_std^2) and C = G (1 - A),
/// so each static map equals the given G exactly. Unstable draws are redrawn.
std::vector<CommunityModel> scalar_population(std::span<const double> G, double a_mean, double a_std,
                                             std::uint64_t seed);

enum class EstimateSource { Exact, Perturbed, History };

struct EstimateSpec {
  EstimateSource source = EstimateSource::Exact;
  double rel_std = 0.0;            ///< multiplicative error applied on top of the source
  std::vector<IoRecord> history;   ///< for EstimateSource::History
  std::optional<std::size_t> window;
};

struct ScenarioConfig {
  std::string name;
  std::vector<CommunityModel> models;  ///< states hold the initial welfare
  Profile initial_funding;             ///< status-quo allocation in force at period 0
  NeighborhoodGraph graph;
  CostSpec cost;
  bool equity_weight_tracks_rho = false;  ///< equity_weight = 1 - rho
  BudgetKind budget_kind = BudgetKind::Cap;
  Profile lower;  ///< empty means zero
  BudgetSchedule schedule;
  std::vector<PolicyConfig> policies;
  PolicyConfig solver;  ///< SOL settings for warm starts and tracking references
  NoiseSpec noise;
  EstimateSpec estimate;
  std::optional<DriftSpec> drift;
  std::size_t horizon = 10;
  std::size_t realizations = 1;
  std::uint64_t seed = 0;
  bool track_reference = false;
  std::size_t threads = 0;  ///< 0 picks the hardware concurrency

  std::size_t communities() const noexcept { return models.size(); }
  BudgetSet budget_at(std::size_t k) const;
  void set_rho(double rho);

  /// Cross-module dimension and consistency checks.
  void validate() const;
};

struct PeriodMetrics {
  double equitability = 0.0;      ///< sum_i metric_i of the noise-free outcomes
  double equal_allocation = 0.0;  ///< unweighted ordered-pair equal-allocation cost
  double total_cost = 0.0;
  double map_error = 0.0;  ///< mean relative Frobenius error of G_hat vs the true map
  std::optional<double> tracking_error;
  Vector mean_outcome;  ///< across communities, per indicator
  Vector outcome_std;   ///< population std across communities, per indicator
  Profile u;            ///< allocation in force
  Profile y;            ///< noise-free outcomes
};

struct PolicyTrace {
  std::string label;
  PolicyKind kind = PolicyKind::SOL;
  /// periods[k]: state at the start of period k, k = 0..K-1 (period 0 is the
  /// status quo baseline).
  std::vector<PeriodMetrics> periods;
  /// State after the last period (k = K).
  PeriodMetrics terminal;
};

struct RunResult {
  std::string name;
  std::size_t horizon = 0;
  std::size_t realizations = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> policies;
  std::vector<std::vector<PolicyTrace>> traces;  ///< [realization][policy]

  /// mean over realizations of terminal / mean over realizations of period 0.
  double normalized_end(std::size_t policy, double PeriodMetrics::*metric) const;
  /// Per-realization terminal values.
  std::vector<double> terminal_values(std::size_t policy, double PeriodMetrics::*metric) const;
};

RunResult run_scenario(const ScenarioConfig& config);

// Long-format table and aggregates. Period K holds the terminal state.
struct RunRow {
  std::size_t realization = 0;
  std::string policy;
  std::size_t period = 0;
  std::string metric;
  double value = 0.0;
};
using RunTable = std::vector<RunRow>;

struct MetricSeries {
  std::string policy;
  std::string metric;
  std::vector<double> mean;  ///< indexed by period
  std::vector<double> std;   ///< sample std over realizations (0 for one realization)
  std::size_t count = 0;
};

RunTable tabulate(const RunResult& result);
/// Groups by (policy, metric) in first-appearance order.
std::vector<MetricSeries> aggregate(const RunTable& table);

struct RhoSweepRow {
  double rho = 0.0;
  double equitability_ratio = 0.0;
  double equal_allocation_ratio = 0.0;
  Vector mean_outcome;
  Vector outcome_std;
};

/// SOL-only runs over rho; ratios are terminal over period-0 values.
std::vector<RhoSweepRow> rho_sweep(ScenarioConfig config, std::span<const double> rho_values);

enum class Quadrant {
  I,    ///< both ratios < 1
  II,   ///< equitability < 1 <= equal allocation
  III,  ///< both >= 1
  IV,   ///< equal allocation < 1 <= equitability
};
const char* to_string(Quadrant q) noexcept;
Quadrant classify(double equitability_ratio, double equal_allocation_ratio) noexcept;

struct ParetoRow {
  double rho = 0.0;
  double sigma = 0.0;
  double equitability_ratio = 0.0;
  double equal_allocation_ratio = 0.0;
  Quadrant quadrant = Quadrant::I;
};

/// SOL-only grid with equity_weight = 1 - rho.
std::vector<ParetoRow> pareto_sweep(ScenarioConfig config, std::span<const double> rho_values,
                                    std::span<const double> sigma_values);

}  // namespace eqalloc
