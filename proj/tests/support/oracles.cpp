#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "eqalloc/dynamics.hpp"

namespace oracle {

Profile fd_gradient(const eqalloc::CostSpec& spec, const eqalloc::NeighborhoodGraph& graph, const Profile& u,
                    std::span<const Matrix> maps, double h) {
  const auto cost = [&](const Profile& v) {
    Profile y(v.rows(), maps[0].rows());
    for (Eigen::Index i = 0; i < v.rows(); ++i) y.row(i) = (maps[static_cast<std::size_t>(i)] * v.row(i).transpose()).transpose();
    return eqalloc::total_cost(spec, graph, v, y);
  };
  Profile g(u.rows(), u.cols());
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    for (Eigen::Index a = 0; a < u.cols(); ++a) {
      Profile plus = u, minus = u;
      plus(i, a) += h;
      minus(i, a) -= h;
      g(i, a) = (cost(plus) - cost(minus)) / (2.0 * h);
    }
  }
  return g;
}

namespace {

Vector project_column(eqalloc::BudgetKind kind, const Vector& v, const Vector& lower, double total) {
  const auto n = v.size();
  const double tol = 1e-12 * std::max(1.0, std::abs(total));
  Vector best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    for (int budget_active = 0; budget_active < 2; ++budget_active) {
      if (kind == eqalloc::BudgetKind::Exact && !budget_active) continue;
      Vector w(n);
      std::vector<Eigen::Index> free;
      double fixed_sum = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (mask & (std::uint64_t{1} << i)) {
          w[i] = lower[i];
          fixed_sum += lower[i];
        } else {
          free.push_back(i);
        }
      }
      double lambda = 0.0;
      if (budget_active && !free.empty()) {
        double free_sum = 0.0;
        for (auto i : free) free_sum += v[i];
        lambda = (free_sum + fixed_sum - total) / static_cast<double>(free.size());
      }
      for (auto i : free) w[i] = v[i] - lambda;
      bool ok = true;
      for (Eigen::Index i = 0; i < n; ++i) ok = ok && w[i] >= lower[i] - tol;
      const double s = w.sum();
      ok = ok && (kind == eqalloc::BudgetKind::Exact ? std::abs(s - total) <= tol * n : s <= total + tol * n);
      if (!ok) continue;
      const double d = (w - v).squaredNorm();
      if (d < best_dist) {
        best_dist = d;
        best = w;
      }
    }
  }
  return best;
}

}  // namespace

Profile brute_force_projection(const eqalloc::BudgetSet& set, const Profile& u) {
  Profile out(u.rows(), u.cols());
  for (Eigen::Index a = 0; a < u.cols(); ++a) {
    Vector lower(u.rows());
    for (Eigen::Index i = 0; i < u.rows(); ++i) lower[i] = set.lower_at(i, a);
    out.col(a) = project_column(set.kind, u.col(a), lower, set.s_max[a]);
  }
  return out;
}

double neqm_by_definition(const eqalloc::NeighborhoodGraph& graph, const Profile& y, std::size_t i) {
  double total = 0.0;
  for (Eigen::Index c = 0; c < y.cols(); ++c) {
    double mean = 0.0;
    std::size_t count = 0;
    for (std::size_t j = 0; j < graph.size(); ++j) {
      if (j != i && graph.adjacent(i, j)) {
        mean += y(static_cast<Eigen::Index>(j), c);
        ++count;
      }
    }
    mean /= static_cast<double>(count);
    const double d = y(static_cast<Eigen::Index>(i), c) - mean;
    total += d * d;
  }
  return total;
}

double equal_allocation_by_definition(const Profile& u) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < u.rows(); ++i)
    for (Eigen::Index j = 0; j < u.rows(); ++j)
      for (Eigen::Index a = 0; a < u.cols(); ++a) total += (u(i, a) - u(j, a)) * (u(i, a) - u(j, a));
  return total;
}

Instance random_instance(eqalloc::Rng& rng, std::size_t max_n, std::size_t max_dim) {
  std::uniform_int_distribution<std::size_t> n_dist(2, max_n), d_dist(1, max_dim);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  Instance inst;
  const std::size_t n = n_dist(rng);
  const auto m = static_cast<Eigen::Index>(d_dist(rng));
  const auto p = static_cast<Eigen::Index>(d_dist(rng));
  inst.graph = eqalloc::random_graph(n, 0.3 + 0.7 * unit(rng), rng());
  for (std::size_t i = 0; i < n; ++i) {
    Matrix G(p, m);
    for (Eigen::Index r = 0; r < p; ++r)
      for (Eigen::Index c = 0; c < m; ++c) G(r, c) = normal(rng);
    inst.maps.push_back(G);
  }
  inst.u = Profile(static_cast<Eigen::Index>(n), m);
  for (Eigen::Index i = 0; i < inst.u.size(); ++i) inst.u.data()[i] = 5.0 * unit(rng);
  inst.spec.rho = unit(rng);
  inst.spec.sigma = unit(rng);
  inst.spec.equity_weight = unit(rng);
  for (std::size_t i = 0; i < n; ++i) {
    inst.spec.omega_u.push_back(unit(rng));
    inst.spec.omega_y.push_back(unit(rng));
  }
  return inst;
}

eqalloc::BudgetSet random_budget(eqalloc::Rng& rng, std::size_t n, std::size_t m) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  eqalloc::BudgetSet set;
  set.kind = unit(rng) < 0.5 ? eqalloc::BudgetKind::Cap : eqalloc::BudgetKind::Exact;
  const auto rows = static_cast<Eigen::Index>(n), cols = static_cast<Eigen::Index>(m);
  set.lower = Profile::Zero(rows, cols);
  if (unit(rng) < 0.7)
    for (Eigen::Index i = 0; i < set.lower.size(); ++i) set.lower.data()[i] = unit(rng);
  set.s_max = set.lower.colwise().sum().transpose() + Vector::NullaryExpr(cols, [&] { return 3.0 * unit(rng); });
  return set;
}

Matrix random_stable(eqalloc::Rng& rng, Eigen::Index n, double radius) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix A(n, n);
  for (Eigen::Index i = 0; i < A.size(); ++i) A.data()[i] = normal(rng);
  const double r = eqalloc::spectral_radius(A);
  return r > 0.0 ? Matrix(A * (radius / r)) : A;
}

}  // namespace oracle
