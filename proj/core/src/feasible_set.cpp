#include "eqalloc/feasible_set.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "eqalloc/error.hpp"

namespace eqalloc {
namespace {

Vector lower_column(const BudgetSet& set, Eigen::Index rows, Eigen::Index a) {
  return set.lower.size() == 0 ? Vector::Zero(rows) : Vector(set.lower.col(a));
}

}  // namespace

void BudgetSet::validate(std::size_t n_communities) const {
  if (s_max.size() == 0) throw Error(ErrorKind::InvalidInput, "budget needs at least one activity");
  if (!s_max.allFinite() || s_max.minCoeff() < 0.0)
    throw Error(ErrorKind::InvalidInput, "s_max must be finite and nonnegative");
  if (lower.size() != 0) {
    if (static_cast<std::size_t>(lower.rows()) != n_communities || lower.cols() != s_max.size())
      throw Error(ErrorKind::InvalidInput, "lower bounds are " + std::to_string(lower.rows()) + "x" +
                                               std::to_string(lower.cols()) + ", expected " +
                                               std::to_string(n_communities) + "x" + std::to_string(s_max.size()));
    if (!lower.allFinite() || lower.minCoeff() < 0.0)
      throw Error(ErrorKind::InvalidInput, "lower bounds must be finite and nonnegative");
    const Vector total = lower.colwise().sum().transpose();
    for (Eigen::Index a = 0; a < s_max.size(); ++a) {
      const double slack = 1e-12 * std::max(1.0, std::abs(s_max[a]));
      if (total[a] > s_max[a] + slack)
        throw Error(ErrorKind::Infeasible, "activity " + std::to_string(a) + ": lower bounds sum to " +
                                               std::to_string(total[a]) + " > s_max " + std::to_string(s_max[a]));
    }
  }
}

Vector project_onto_budget_face(const Vector& v, const Vector& lower, double total) {
  const Eigen::Index n = v.size();
  const double target = total - lower.sum();
  if (target < -1e-12 * std::max(1.0, std::abs(total)))
    throw Error(ErrorKind::Infeasible, "lower bounds exceed the budget");
  if (n == 0) return v;
  // Shifted problem: z = v - lower onto the simplex { z >= 0, sum z = target }.
  std::vector<double> z(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) z[static_cast<std::size_t>(i)] = v[i] - lower[i];
  std::vector<double> sorted = z;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const double t = std::max(target, 0.0);
  double prefix = 0.0;
  double tau = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    prefix += sorted[k];
    const double candidate = (prefix - t) / static_cast<double>(k + 1);
    if (k + 1 == sorted.size() || sorted[k + 1] <= candidate) {
      tau = candidate;
      break;
    }
  }
  Vector w(n);
  for (Eigen::Index i = 0; i < n; ++i) w[i] = lower[i] + std::max(z[static_cast<std::size_t>(i)] - tau, 0.0);
  return w;
}

Profile project(const BudgetSet& set, const Profile& u) {
  if (u.cols() != set.activities())
    throw Error(ErrorKind::InvalidInput, "allocation has " + std::to_string(u.cols()) + " activities, budget has " +
                                             std::to_string(set.activities()));
  if (set.lower.size() != 0 && set.lower.rows() != u.rows())
    throw Error(ErrorKind::InvalidInput, "lower bounds do not match the number of communities");
  if (!u.allFinite()) throw Error(ErrorKind::Numerical, "non-finite allocation");
  Profile out(u.rows(), u.cols());
  for (Eigen::Index a = 0; a < u.cols(); ++a) {
    const Vector lower = lower_column(set, u.rows(), a);
    if (set.kind == BudgetKind::Cap) {
      if (lower.sum() > set.s_max[a] + 1e-12 * std::max(1.0, std::abs(set.s_max[a])))
        throw Error(ErrorKind::Infeasible, "lower bounds exceed the budget");
      Vector clamped = u.col(a).cwiseMax(lower);
      if (clamped.sum() <= set.s_max[a]) {
        out.col(a) = clamped;
        continue;
      }
    }
    out.col(a) = project_onto_budget_face(u.col(a), lower, set.s_max[a]);
  }
  return out;
}

bool is_feasible(const BudgetSet& set, const Profile& u, double tol) {
  if (u.cols() != set.activities()) return false;
  if (set.lower.size() != 0 && set.lower.rows() != u.rows()) return false;
  if (!u.allFinite()) return false;
  for (Eigen::Index a = 0; a < u.cols(); ++a) {
    for (Eigen::Index i = 0; i < u.rows(); ++i)
      if (u(i, a) < set.lower_at(i, a) - tol) return false;
    const double total = u.col(a).sum();
    if (total > set.s_max[a] + tol) return false;
    if (set.kind == BudgetKind::Exact && total < set.s_max[a] - tol) return false;
  }
  return true;
}

}  // namespace eqalloc
