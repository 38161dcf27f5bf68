#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "eqalloc/types.hpp"

namespace eqalloc {

/// One same-period (u, y) observation of a community.
struct IoRecord {
  std::size_t community = 0;
  long period = 0;
  Vector u;
  Vector y;
};

struct MapEstimate {
  Matrix G_hat;
  std::size_t n_samples = 0;
  std::optional<std::size_t> window;
  bool rank_deficient = false;
};

/// Least-squares G_hat minimizing sum ||y_k - G_hat u_k||^2 over the last
/// `window` records (all records when unset). Rank-deficient inputs get the
/// minimum-norm solution and are flagged.
MapEstimate fit_linear(std::span<const IoRecord> records, std::optional<std::size_t> window = std::nullopt);

/// Entrywise multiplicative error: G_hat = G .* (1 + eps), eps ~ N(0, rel_std^2).
MapEstimate perturb_estimate(const Matrix& G, double rel_std, std::uint64_t seed);

/// sum_k ||y_k - G u_k||^2.
double residual_sum(std::span<const IoRecord> records, const Matrix& G);

/// An estimate together with the history it was fitted on.
struct LearnedMap {
  MapEstimate estimate;
  std::vector<IoRecord> history;
};

/// Appends the record and refits over the window; identical to a batch
/// fit_linear on the extended history.
LearnedMap relearn_step(LearnedMap current, IoRecord record, std::optional<std::size_t> window);

}  // namespace eqalloc
