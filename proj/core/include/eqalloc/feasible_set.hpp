#pragma once

#include <cstddef>

#include "eqalloc/types.hpp"

namespace eqalloc {

enum class BudgetKind {
  Cap,    ///< u_i >= lower_i, sum_i u_i <= s_max (per activity)
  Exact,  ///< u_i >= lower_i, sum_i u_i == s_max (per activity)
};

struct BudgetSet {
  BudgetKind kind = BudgetKind::Cap;
  Vector s_max;   ///< one cap per activity (length m)
  Profile lower;  ///< N x m lower bounds; an empty matrix means zero

  Eigen::Index activities() const noexcept { return s_max.size(); }
  double lower_at(Eigen::Index i, Eigen::Index a) const { return lower.size() == 0 ? 0.0 : lower(i, a); }

  /// Throws Infeasible when the bounds cannot be met, InvalidInput on bad shapes.
  void validate(std::size_t n_communities) const;
};

/// Euclidean projection of a full allocation profile onto the set. The
/// problem separates by activity; each column is projected on its own.
Profile project(const BudgetSet& set, const Profile& u);

bool is_feasible(const BudgetSet& set, const Profile& u, double tol);

/// Projection of v onto { w >= lower, sum w == total } by the sort-based
/// simplex threshold.
Vector project_onto_budget_face(const Vector& v, const Vector& lower, double total);

}  // namespace eqalloc
