#include "eqalloc/policies.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "eqalloc/error.hpp"
#include "eqalloc/rng.hpp"

namespace eqalloc {
namespace {

constexpr std::size_t kPowerIterationCap = 100000;
constexpr double kPowerIterationTol = 1e-12;
constexpr std::uint64_t kPowerIterationSeed = 0x4c697073;

double model_cost(const CostSpec& spec, const NeighborhoodGraph& graph, std::span<const Matrix> maps,
                  const Profile& u) {
  return total_cost(spec, graph, u, predict_outcomes(maps, u));
}

}  // namespace

const char* to_string(PolicyKind kind) noexcept {
  switch (kind) {
    case PolicyKind::SOL: return "SOL";
    case PolicyKind::DCL: return "DCL";
    case PolicyKind::DCLPlus: return "DCL+";
  }
  return "?";
}

PolicyKind policy_kind_from_string(const std::string& s) {
  if (s == "SOL" || s == "sol") return PolicyKind::SOL;
  if (s == "DCL" || s == "dcl") return PolicyKind::DCL;
  if (s == "DCL+" || s == "dcl+" || s == "DCLPlus" || s == "dclplus") return PolicyKind::DCLPlus;
  throw Error(ErrorKind::Parse, "unknown policy kind '" + s + "'");
}

void PolicyConfig::validate() const {
  if (!auto_gamma && !(gamma > 0.0 && std::isfinite(gamma)))
    throw Error(ErrorKind::InvalidInput, label() + ": gamma must be positive");
  if (!(gamma_scale > 0.0 && std::isfinite(gamma_scale)))
    throw Error(ErrorKind::InvalidInput, label() + ": gamma_scale must be positive");
  if (kind == PolicyKind::SOL && l_max < 1) throw Error(ErrorKind::InvalidInput, label() + ": l_max must be >= 1");
  if (!(stop_tol >= 0.0)) throw Error(ErrorKind::InvalidInput, label() + ": stop_tol must be nonnegative");
  if (relearn_window && *relearn_window == 0)
    throw Error(ErrorKind::InvalidInput, label() + ": relearn_window must be >= 1");
}

std::vector<Matrix> PolicyState::maps() const {
  std::vector<Matrix> out;
  out.reserve(estimates.size());
  for (const auto& e : estimates) out.push_back(e.estimate.G_hat);
  return out;
}

double lipschitz_estimate(const NeighborhoodGraph& graph, std::span<const Matrix> maps, const CostSpec& spec) {
  if (spec.metric != Metric::NEqM)
    throw Error(ErrorKind::UnsupportedMetric, "Lipschitz estimate requires the NEqM metric");
  if (maps.empty()) throw Error(ErrorKind::InvalidInput, "no maps");
  const auto n = static_cast<Eigen::Index>(maps.size());
  const Eigen::Index m = maps.front().cols();

  // The gradient is linear in u, so it is the Hessian-vector product.
  Rng rng = make_rng({kPowerIterationSeed});
  std::uniform_real_distribution<double> unit(0.5, 1.5);
  Profile v(n, m);
  for (Eigen::Index i = 0; i < v.size(); ++i) v.data()[i] = unit(rng);
  v /= v.norm();

  double lambda = 0.0;
  for (std::size_t it = 0; it < kPowerIterationCap; ++it) {
    Profile w = cost_gradient(spec, graph, v, maps);
    const double next = (v.array() * w.array()).sum();
    const double norm = w.norm();
    if (!(norm > 0.0)) throw Error(ErrorKind::Estimation, "cost has zero curvature; set gamma explicitly");
    v = w / norm;
    if (it > 0 && std::abs(next - lambda) <= kPowerIterationTol * std::abs(next)) return std::max(next, norm);
    lambda = next;
  }
  throw Error(ErrorKind::Estimation, "power iteration did not converge");
}

double resolve_gamma(const PolicyConfig& config, const NeighborhoodGraph& graph, std::span<const Matrix> maps,
                     const CostSpec& spec) {
  if (!config.auto_gamma) return config.gamma;
  return config.gamma_scale / lipschitz_estimate(graph, maps, spec);
}

Profile default_start(const BudgetSet& set, std::size_t n_communities) {
  const auto n = static_cast<Eigen::Index>(n_communities);
  Profile split(n, set.activities());
  for (Eigen::Index a = 0; a < set.activities(); ++a) split.col(a).setConstant(set.s_max[a] / static_cast<double>(n));
  if (set.lower.size() != 0) split = split.cwiseMax(set.lower);
  return project(set, split);
}

Profile projected_gradient_step(const CostSpec& spec, const NeighborhoodGraph& graph, std::span<const Matrix> maps,
                                const BudgetSet& set, const Profile& u, double gamma) {
  return project(set, u - gamma * cost_gradient(spec, graph, u, maps));
}

Profile sol_solve(const NeighborhoodGraph& graph, std::span<const Matrix> maps, const CostSpec& spec,
                  const BudgetSet& set, const PolicyConfig& config, const Profile& start, SolReport* report,
                  bool record_costs, const IterateObserver& observer) {
  const double gamma = resolve_gamma(config, graph, maps, spec);
  Profile u = project(set, start);
  double cost = model_cost(spec, graph, maps, u);
  SolReport local;
  local.gamma = gamma;
  if (record_costs) local.costs.push_back(cost);
  if (observer) observer(0, u);

  for (std::size_t it = 1; it <= config.l_max; ++it) {
    Profile next = projected_gradient_step(spec, graph, maps, set, u, gamma);
    const double next_cost = model_cost(spec, graph, maps, next);
    if (next_cost > cost + 1e-9 * std::max(1.0, std::abs(cost))) {
      throw Error(ErrorKind::StepSize, "cost increased from " + std::to_string(cost) + " to " +
                                           std::to_string(next_cost) + " at iteration " + std::to_string(it) +
                                           "; use a smaller gamma");
    }
    local.final_displacement = (next - u).norm();
    local.iterations = it;
    u = std::move(next);
    cost = next_cost;
    if (record_costs) local.costs.push_back(cost);
    if (observer) observer(it, u);
    if (config.stop_tol > 0.0 && local.final_displacement < config.stop_tol) {
      local.converged = true;
      break;
    }
  }
  if (report) *report = std::move(local);
  return u;
}

Profile sol_solve(const NeighborhoodGraph& graph, std::span<const Matrix> maps, const CostSpec& spec,
                  const BudgetSet& set, const PolicyConfig& config) {
  return sol_solve(graph, maps, spec, set, config, default_start(set, graph.size()));
}

PolicyState initial_state(const NeighborhoodGraph& graph, std::vector<LearnedMap> estimates, const CostSpec& spec,
                          const BudgetSet& set, const PolicyConfig& sol_config) {
  PolicyState state;
  state.estimates = std::move(estimates);
  const auto maps = state.maps();
  state.current_u = sol_solve(graph, maps, spec, set, sol_config);
  state.applied_u = state.current_u;
  return state;
}

PolicyState dcl_step(PolicyState state, const Profile& y_measured, const CostSpec& spec,
                     const NeighborhoodGraph& graph, const BudgetSet& set, const PolicyConfig& config) {
  const auto maps = state.maps();
  if (!state.gamma) state.gamma = resolve_gamma(config, graph, maps, spec);
  const Profile grad = feedback_gradient(spec, graph, state.current_u, y_measured, maps);
  Profile next = project(set, state.current_u - *state.gamma * grad);
  if (!next.allFinite()) throw Error(ErrorKind::Numerical, "non-finite allocation");
  state.current_u = next;
  state.applied_u = std::move(next);
  ++state.period;
  return state;
}

PolicyState dclplus_step(PolicyState state, const Profile& y_measured, const CostSpec& spec,
                         const NeighborhoodGraph& graph, const BudgetSet& set, const PolicyConfig& config) {
  const Profile observed_u = state.applied_u.size() != 0 ? state.applied_u : state.current_u;
  state = dcl_step(std::move(state), y_measured, spec, graph, set, config);

  bool changed = false;
  for (std::size_t i = 0; i < state.estimates.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    IoRecord record{i, static_cast<long>(state.period) - 1, observed_u.row(row).transpose(),
                    y_measured.row(row).transpose()};
    auto& learned = state.estimates[i];
    const MapEstimate previous = learned.estimate;
    learned = relearn_step(std::move(learned), std::move(record), config.relearn_window);
    const auto m = static_cast<std::size_t>(learned.estimate.G_hat.cols());
    if (learned.estimate.rank_deficient || learned.estimate.n_samples < m) {
      learned.estimate = previous;
    } else if (learned.estimate.G_hat != previous.G_hat) {
      changed = true;
    }
  }
  if (changed && config.auto_gamma) state.gamma.reset();
  return state;
}

}  // namespace eqalloc
