#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eqalloc/estimation.hpp"
#include "eqalloc/feasible_set.hpp"
#include "eqalloc/objectives.hpp"
#include "eqalloc/topology.hpp"

namespace eqalloc {

enum class PolicyKind {
  SOL,      ///< static open loop: full projected-gradient solve on the estimated maps
  DCL,      ///< dynamic closed loop: one feedback gradient step per period
  DCLPlus,  ///< DCL plus per-period refit of the maps
};

const char* to_string(PolicyKind kind) noexcept;
PolicyKind policy_kind_from_string(const std::string& s);

struct PolicyConfig {
  PolicyKind kind = PolicyKind::SOL;
  std::string name;  ///< output label; empty means to_string(kind)
  double gamma = 0.0;
  bool auto_gamma = true;    ///< gamma = gamma_scale / L with L from lipschitz_estimate
  double gamma_scale = 1.0;  ///< only used with auto_gamma
  std::size_t l_max = 50000;
  double stop_tol = 1e-10;  ///< SOL early stop on iterate displacement; 0 disables
  std::optional<std::size_t> relearn_window;

  std::string label() const { return name.empty() ? to_string(kind) : name; }
  void validate() const;
};

struct PolicyState {
  Profile current_u;
  /// Allocation in force when the next measurement is taken. Usually equal
  /// to current_u; differs only before the first allocation is implemented.
  Profile applied_u;
  std::vector<LearnedMap> estimates;
  std::size_t period = 0;
  /// Resolved step size; unset means resolve from the config.
  std::optional<double> gamma;

  std::vector<Matrix> maps() const;
};

/// Largest eigenvalue of the (constant) Hessian of the total cost under
/// y = G_hat u, by power iteration.
double lipschitz_estimate(const NeighborhoodGraph& graph, std::span<const Matrix> maps, const CostSpec& spec);

double resolve_gamma(const PolicyConfig& config, const NeighborhoodGraph& graph, std::span<const Matrix> maps,
                     const CostSpec& spec);

/// Equal split of s_max over communities, raised to the lower bounds and
/// projected into the set.
Profile default_start(const BudgetSet& set, std::size_t n_communities);

/// Pi_B(u - gamma * cost_gradient(u)).
Profile projected_gradient_step(const CostSpec& spec, const NeighborhoodGraph& graph, std::span<const Matrix> maps,
                                const BudgetSet& set, const Profile& u, double gamma);

struct SolReport {
  std::size_t iterations = 0;
  double final_displacement = 0.0;
  bool converged = false;  ///< displacement fell below stop_tol
  double gamma = 0.0;
  std::vector<double> costs;  ///< filled when requested; costs[0] is the start
};

using IterateObserver = std::function<void(std::size_t iteration, const Profile& u)>;

/// Runs up to l_max projected-gradient iterations from `start`. Throws
/// StepSize if the cost rises between iterations.
Profile sol_solve(const NeighborhoodGraph& graph, std::span<const Matrix> maps, const CostSpec& spec,
                  const BudgetSet& set, const PolicyConfig& config, const Profile& start,
                  SolReport* report = nullptr, bool record_costs = false, const IterateObserver& observer = {});

Profile sol_solve(const NeighborhoodGraph& graph, std::span<const Matrix> maps, const CostSpec& spec,
                  const BudgetSet& set, const PolicyConfig& config);

/// Warm start shared by DCL and DCL+: the SOL solution on the initial estimates.
PolicyState initial_state(const NeighborhoodGraph& graph, std::vector<LearnedMap> estimates, const CostSpec& spec,
                          const BudgetSet& set, const PolicyConfig& sol_config);

/// u_{k+1} = Pi_B(u_k - gamma * feedback_gradient(u_k, y_k, G_hat)).
PolicyState dcl_step(PolicyState state, const Profile& y_measured, const CostSpec& spec,
                     const NeighborhoodGraph& graph, const BudgetSet& set, const PolicyConfig& config);

/// dcl_step, then appends (applied u, y) to each community's history and
/// refits. A refit is adopted only when it is full rank.
PolicyState dclplus_step(PolicyState state, const Profile& y_measured, const CostSpec& spec,
                         const NeighborhoodGraph& graph, const BudgetSet& set, const PolicyConfig& config);

}  // namespace eqalloc
