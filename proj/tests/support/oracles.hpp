#pragma once

// Independent reference implementations used only by the tests. None of
// them call into the library's optimized paths.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "eqalloc/feasible_set.hpp"
#include "eqalloc/objectives.hpp"
#include "eqalloc/rng.hpp"
#include "eqalloc/topology.hpp"

namespace oracle {

using eqalloc::Matrix;
using eqalloc::Profile;
using eqalloc::Vector;

// Central differences of u -> total_cost(u, maps * u).
Profile fd_gradient(const eqalloc::CostSpec& spec, const eqalloc::NeighborhoodGraph& graph, const Profile& u,
                    std::span<const Matrix> maps, double h = 1e-6);

// Projection by exhaustive active-set enumeration: every subset of lower
// bounds held active, with and without the budget row active, solved in
// closed form; the closest primal-feasible candidate wins.
Profile brute_force_projection(const eqalloc::BudgetSet& set, const Profile& u);

// Plain double loops over the definitions.
double neqm_by_definition(const eqalloc::NeighborhoodGraph& graph, const Profile& y, std::size_t i);
double equal_allocation_by_definition(const Profile& u);

struct Instance {
  eqalloc::NeighborhoodGraph graph;
  std::vector<Matrix> maps;
  Profile u;
  eqalloc::CostSpec spec;
};

// Random connected-enough graph, maps, allocation and weights with
// N <= max_n, m, p <= max_dim.
Instance random_instance(eqalloc::Rng& rng, std::size_t max_n, std::size_t max_dim);

eqalloc::BudgetSet random_budget(eqalloc::Rng& rng, std::size_t n, std::size_t m);

// A random stable matrix with spectral radius at most `radius`.
Matrix random_stable(eqalloc::Rng& rng, Eigen::Index n, double radius);

}  // namespace oracle
