#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "eqalloc/topology.hpp"
#include "eqalloc/types.hpp"

namespace eqalloc {

enum class Metric {
  NEqM,    ///< squared distance to the neighbor mean
  WcNEqM,  ///< infinity-norm distance to the neighbor mean
};

/// total = rho * equal_allocation(u)
///       + equity_weight * sum_i metric_i(y)
///       + sigma * sum_i Delta_i(u, y)
struct CostSpec {
  Metric metric = Metric::NEqM;
  double rho = 0.0;
  double sigma = 0.0;
  double equity_weight = 1.0;
  /// Per-community preference weights in [0, 1]. Empty means all zero.
  std::vector<double> omega_u;
  std::vector<double> omega_y;

  double omega_u_at(std::size_t i) const { return omega_u.empty() ? 0.0 : omega_u.at(i); }
  double omega_y_at(std::size_t i) const { return omega_y.empty() ? 0.0 : omega_y.at(i); }

  void validate(std::size_t n_communities) const;
};

/// Row i: values_i - neighbor_mean(values, i).
Profile neighbor_deviations(const NeighborhoodGraph& graph, const Profile& values);

double neqm(const NeighborhoodGraph& graph, const Profile& y, std::size_t i);
double wc_neqm(const NeighborhoodGraph& graph, const Profile& y, std::size_t i);

/// sum_i metric_i(y).
double equitability_violation(const NeighborhoodGraph& graph, const Profile& y, Metric metric = Metric::NEqM);

/// sum over ordered pairs (i, j) of ||u_i - u_j||^2; each unordered pair counts twice.
double equal_allocation_cost(const Profile& u);

double dissatisfaction(const NeighborhoodGraph& graph, const Profile& u, const Profile& y, std::size_t i,
                       double omega_u_i, double omega_y_i);

double total_cost(const CostSpec& spec, const NeighborhoodGraph& graph, const Profile& u, const Profile& y);

/// Row i: maps[i] * u.row(i).
Profile predict_outcomes(std::span<const Matrix> maps, const Profile& u);

/// Exact gradient of total_cost(u, maps * u) with respect to every u_i.
/// NEqM only: WC-NEqM is not differentiable and is rejected.
Profile cost_gradient(const CostSpec& spec, const NeighborhoodGraph& graph, const Profile& u,
                      std::span<const Matrix> maps);

/// Same chain rule as cost_gradient, but the outcome-side derivative is
/// evaluated at measured outcomes y instead of maps * u.
Profile feedback_gradient(const CostSpec& spec, const NeighborhoodGraph& graph, const Profile& u,
                          const Profile& y, std::span<const Matrix> maps);

}  // namespace eqalloc
