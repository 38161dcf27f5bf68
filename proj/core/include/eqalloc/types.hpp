#pragma once

#include <Eigen/Dense>

namespace eqalloc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Per-community stack of vectors: row i belongs to community i.
/// Used for allocations (N x m) and outcomes (N x p).
using Profile = Eigen::MatrixXd;

}  // namespace eqalloc
